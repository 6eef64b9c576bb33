#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinotto/cycle.hpp"

namespace spinotto {

enum class PairingRule {
    even,    // tau_h = tau_c = the swept per-stroke time
    closure, // split each contact budget so both strokes move equal quanta
};

struct SweepSpec {
    CycleSpec base{};
    double tau_min_ms = 50.0;  // per-stroke contact time, first point
    double tau_max_ms = 1500.0;
    int steps = 30;
    PairingRule pairing = PairingRule::even;
    std::size_t n_traj = 0; // per-point stochastic cross-check (0 disables)
    std::uint64_t seed = 1;
    int max_workers = 0; // 0: hardware concurrency

    // When non-empty, overrides the generated grid with explicit
    // (tau_h, tau_c) pairs.
    std::vector<std::pair<double, double>> explicit_pairs;

    void validate() const;
};

// Monte-Carlo consistency check of one sweep point against the rate
// equations: z-scores of the ensemble mean quanta per stroke.
struct McCheck {
    std::size_t n_traj = 0;
    double mean_quanta_h = 0.0;
    double mean_quanta_c = 0.0;
    double z_heating = 0.0;
    double z_cooling = 0.0;
    bool consistent = true; // |z| <= 4 on both strokes
};

struct SweepRow {
    CycleRecord record{};
    int iterations = 0;
    std::optional<McCheck> mc;
    std::optional<std::string> error; // failed points are kept in-row
};

struct SweepMetadata {
    std::uint64_t seed = 0;
    std::string rng_algorithm;
    std::string rate_table_hash;
    std::string constants_version;
    std::string pairing;
    std::size_t n_traj = 0;
    int schema_version = 1;
};

struct SweepResult {
    std::vector<SweepRow> rows; // ascending tau_cycle
    std::optional<std::size_t> argmax_power; // error rows skipped
    std::optional<double> fano_crossing_ms;  // interpolated F = 1 crossing
    SweepMetadata metadata{};
};

// Limit-cycle sweep over cycle times.  Points are independent and processed
// by a bounded worker pool; row order and RNG substreams are fixed by point
// index, so results do not depend on scheduling.
SweepResult run_sweep(const SweepSpec& spec);

// Split a contact-time budget (tau_h + tau_c = budget) so that the expected
// collision count of a hot stroke started from the polarized state equals
// that of a cold stroke started from the inverted state, matching how the
// two strokes are probed independently in measurement.  Monotone in the
// split fraction, solved by bisection to `count_tol` collisions.
std::pair<double, double> pair_strokes_for_closure(const CycleSpec& base, double budget_ms,
                                                   double count_tol = 1e-6);

// Post-hoc sweep validators (also used by the CLI `check` battery).
double eta_spread(const SweepResult& result); // max |eta_i - eta_j| over closed rows
bool sigma_p_decreasing_past(const SweepResult& result, double n_spin_threshold = 6.0);

} // namespace spinotto
