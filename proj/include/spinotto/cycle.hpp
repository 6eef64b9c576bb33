#pragma once

#include <cstdint>
#include <optional>

#include "spinotto/cycle_spec.hpp"
#include "spinotto/kinetics.hpp"
#include "spinotto/thermo.hpp"

namespace spinotto {

// Dimensionless adiabaticity parameter hbar |Bdot| / (g mu_B B^2): the ratio
// of the fractional Larmor-frequency change per Larmor period.
double adiabaticity(double b_mG, double b_dot_mG_per_ms, double g_factor);

struct AdiabaticityReport {
    double b_from_mG = 0.0;
    double b_to_mG = 0.0;
    double a_start = 0.0; // at the ramp's starting field
    double a_end = 0.0;   // at the final field
    double a_max = 0.0;   // worst point along the ramp (linear: lowest field)
    double threshold = 0.0;
    bool passes = true;
};

// Linear field ramp treated as perfectly adiabatic: populations are carried
// over bit-identically, only the level spacing changes.  The report flags
// how well the adiabatic approximation is justified; it never alters the
// state.  Uses the medium's g-factor.
struct RampResult {
    LevelDistribution dist;
    AdiabaticityReport report;
};

RampResult adiabatic_ramp(const LevelDistribution& dist, double b_from_mG, double b_to_mG,
                          double ramp_ms, const CouplingConstants& c, double threshold);

// Everything a single four-stroke cycle produces.  Stroke labels: A -> B hot
// contact at b1, B -> C ramp down, C -> D cold contact at b2, D -> A' ramp
// up.  The cycle is closed when dist_a_next returns to dist_a.
struct CycleRecord {
    LevelDistribution dist_a = LevelDistribution::polarized();
    LevelDistribution dist_b = LevelDistribution::polarized();
    LevelDistribution dist_c = LevelDistribution::polarized();
    LevelDistribution dist_d = LevelDistribution::polarized();
    LevelDistribution dist_a_next = LevelDistribution::polarized();

    double tau_h_ms = 0.0;
    double tau_c_ms = 0.0;
    double tau_cycle_ms = 0.0; // contacts + both ramps; bath swap excluded
    double bath_swap_ms = 0.0; // recorded, not part of the cycle time

    double q_h = 0.0;
    double q_c = 0.0;
    double q_l = 0.0;
    double w_bc = 0.0; // ramp-down stroke work (medium energy change)
    double w_da = 0.0; // ramp-up stroke work
    double w = 0.0;    // produced work q_h - |q_c|

    HeatLedger ledger{};

    std::optional<double> eta;
    std::optional<double> eta_int;
    double power = 0.0;
    double sigma_w_sq = 0.0;
    double sigma_p_sq = 0.0;
    std::optional<double> fano;

    double n_heating = 0.0; // expected collisions, hot contact
    double n_cooling = 0.0;
    double n_spin = 0.0;    // per cycle

    AdiabaticityReport ramp_down{};
    AdiabaticityReport ramp_up{};

    double closure_residual = 0.0; // max-norm |dist_a_next - dist_a|
    bool closed = false;
};

// Run one cycle from spec.initial.
CycleRecord run_cycle(const CycleSpec& spec);

// Iterate the cycle map until the start-of-cycle distribution is a fixed
// point (max-norm residual < tol).  The chain composition is a contraction,
// so this converges for any initial distribution; exceeding max_iters is a
// simulation error.
struct LimitCycleResult {
    CycleRecord record;
    int iterations = 0;
    double residual = 0.0;
};

LimitCycleResult find_limit_cycle(const CycleSpec& spec, double tol = 1e-13, int max_iters = 10000);

// First-law residual of a record: q_h + q_c + w_bc + w_da, which telescopes
// to lambda b1 (<n>_A' - <n>_A) and vanishes for a closed cycle.
double first_law_residual(const CycleRecord& record);

// Trajectory-exact counting statistics of full cycles: every trajectory
// samples a start level from spec.initial, runs the hot contact, carries its
// level through the ramp, runs the cold contact.  Work per trajectory is
// lambda (b1 dn_up - b2 dn_down).  This is the correlation-aware alternative
// to the endpoint-variance estimator in thermo.hpp.
struct WorkEnsemble {
    std::size_t n_traj = 0;
    double mean_work = 0.0;
    double var_work = 0.0; // unbiased
    double mean_quanta = 0.0;
    double var_quanta = 0.0;
};

WorkEnsemble trajectory_work_ensemble(const CycleSpec& spec, std::size_t n_traj, std::uint64_t seed);

} // namespace spinotto
