#pragma once

#include <cstdint>
#include <vector>

#include "spinotto/level_distribution.hpp"
#include "spinotto/rate_table.hpp"
#include "spinotto/rng.hpp"

namespace spinotto {

enum class Direction { heating, cooling };

// One bath contact: direction, duration, the static field it happens at
// (bookkeeping only; the collision rates themselves carry no field
// dependence) and the active rate set.
struct ContactPhase {
    Direction direction;
    double duration_ms;
    double field_mG;
    RateTable rates;
};

// Deterministic rate-equation propagation of the one-directional 7-level
// chain over a contact phase.  Fixed-step RK4 with step
// h <= min(0.01 / max_rate, duration / 100); probability columns of the
// generator sum to zero so normalization is conserved to rounding.
LevelDistribution evolve_master(const LevelDistribution& initial, const ContactPhase& phase);

// Same propagation, also integrating the mean collision rate into the
// expected number of spin-exchange collisions over the phase.
struct EvolveResult {
    LevelDistribution dist;
    double collisions;
};
EvolveResult evolve_master_counted(const LevelDistribution& initial, const ContactPhase& phase);

// Instantaneous mean collision rate sum_n p_n Gamma_n over the levels that
// are active in the phase's direction.
double mean_collision_rate(const LevelDistribution& dist, const ContactPhase& phase);

// Exact stochastic realization of the same chain (Gillespie sampling of the
// embedded jump process).  Levels move monotonically toward the absorbing
// end of the active direction.
struct TrajectoryRecord {
    int start_level = 0;
    int final_level = 0;
    std::vector<double> jump_times_ms; // ascending, within-phase times
    int quanta() const { return static_cast<int>(jump_times_ms.size()); }
};

TrajectoryRecord sample_trajectory(int start_level, const ContactPhase& phase, SplitMix64& rng);

// Counting statistics of an ensemble of independent trajectories whose start
// levels are drawn from `initial`.  Trajectory j uses the substream derived
// from (seed, j).
struct EnsembleStatistics {
    std::size_t n_traj = 0;
    std::array<std::size_t, constants::n_levels> final_counts{};
    std::array<double, constants::n_levels> final_fraction{};
    double mean_quanta = 0.0;
    double var_quanta = 0.0; // unbiased
};

EnsembleStatistics ensemble_statistics(const LevelDistribution& initial, const ContactPhase& phase,
                                       std::size_t n_traj, std::uint64_t seed);

} // namespace spinotto
