#include <cmath>
#include <limits>
#include <sstream>

#include "spinotto/cycle.hpp"
#include "spinotto/errors.hpp"

namespace spinotto {

double adiabaticity(double b_mG, double b_dot_mG_per_ms, double g_factor) {
    if (!(b_mG > 0.0))
        throw DomainError("field must be positive");
    if (!(g_factor > 0.0))
        throw DomainError("g-factor must be positive");
    double larmor_energy = g_factor * constants::mu_bohr_J_per_T * b_mG * b_mG;
    return constants::hbar_J_s * std::abs(b_dot_mG_per_ms) *
           constants::adiabaticity_unit_factor / larmor_energy;
}

RampResult adiabatic_ramp(const LevelDistribution& dist, double b_from_mG, double b_to_mG,
                          double ramp_ms, const CouplingConstants& c, double threshold) {
    if (!(b_from_mG > 0.0) || !(b_to_mG > 0.0))
        throw DomainError("ramp endpoints must be positive fields");
    if (!(ramp_ms >= 0.0))
        throw DomainError("ramp duration must be non-negative");

    AdiabaticityReport rep;
    rep.b_from_mG = b_from_mG;
    rep.b_to_mG = b_to_mG;
    rep.threshold = threshold;
    double g = c.g_medium();
    if (b_from_mG == b_to_mG) {
        // Static field: nothing sweeps, the criterion is trivially met.
        rep.a_start = rep.a_end = rep.a_max = 0.0;
        rep.passes = true;
        return RampResult{dist, rep};
    }
    if (ramp_ms == 0.0) {
        // Instantaneous quench between different fields: maximally diabatic.
        rep.a_start = rep.a_end = rep.a_max = std::numeric_limits<double>::infinity();
        rep.passes = false;
        return RampResult{dist, rep};
    }
    double b_dot = (b_to_mG - b_from_mG) / ramp_ms;
    rep.a_start = adiabaticity(b_from_mG, b_dot, g);
    rep.a_end = adiabaticity(b_to_mG, b_dot, g);
    // A ~ 1/B^2 at fixed Bdot, so the worst point of a linear ramp is the
    // lower field endpoint.
    rep.a_max = adiabaticity(std::min(b_from_mG, b_to_mG), b_dot, g);
    rep.passes = rep.a_max < threshold;
    return RampResult{dist, rep};
}

CycleRecord run_cycle(const CycleSpec& spec) {
    spec.validate();

    CycleRecord rec;
    rec.tau_h_ms = spec.tau_h_ms;
    rec.tau_c_ms = spec.tau_c_ms;
    rec.tau_cycle_ms = spec.cycle_time_ms();
    rec.bath_swap_ms = spec.bath_swap_ms;

    const auto& f = spec.field;

    rec.dist_a = spec.initial;

    ContactPhase hot{Direction::heating, spec.tau_h_ms, f.b1_mG, spec.rates};
    EvolveResult heat = evolve_master_counted(rec.dist_a, hot);
    rec.dist_b = heat.dist;
    rec.n_heating = heat.collisions;

    RampResult down = adiabatic_ramp(rec.dist_b, f.b1_mG, f.b2_mG, f.ramp_ms, spec.coupling,
                                     spec.adiabaticity_threshold);
    rec.dist_c = down.dist;
    rec.ramp_down = down.report;

    ContactPhase cold{Direction::cooling, spec.tau_c_ms, f.b2_mG, spec.rates};
    EvolveResult coolr = evolve_master_counted(rec.dist_c, cold);
    rec.dist_d = coolr.dist;
    rec.n_cooling = coolr.collisions;

    RampResult up = adiabatic_ramp(rec.dist_d, f.b2_mG, f.b1_mG, f.ramp_ms, spec.coupling,
                                   spec.adiabaticity_threshold);
    rec.dist_a_next = up.dist;
    rec.ramp_up = up.report;

    const auto& c = spec.coupling;
    rec.q_h = heat_engine_side(rec.dist_a, rec.dist_b, f.b1_mG, c);
    rec.q_c = heat_engine_side(rec.dist_c, rec.dist_d, f.b2_mG, c);
    rec.w_bc = work_stroke(rec.dist_b, f.b1_mG, f.b2_mG, c);
    rec.w_da = work_stroke(rec.dist_d, f.b2_mG, f.b1_mG, c);
    rec.ledger = make_heat_ledger(rec.q_h, rec.q_c, c);
    rec.q_l = rec.ledger.q_l;
    rec.w = rec.q_h - std::abs(rec.q_c);

    rec.eta = efficiency(rec.ledger);
    rec.eta_int = internal_efficiency(rec.q_h, rec.q_c);
    rec.power = cycle_power(rec.w, rec.tau_cycle_ms);
    rec.sigma_w_sq = work_fluctuations(rec.dist_a, rec.dist_b, rec.dist_c, rec.dist_d, f, c);
    rec.sigma_p_sq = rec.sigma_w_sq / (rec.tau_cycle_ms * rec.tau_cycle_ms);
    rec.fano = fano_factor(rec.sigma_p_sq, rec.power);

    rec.n_spin = rec.n_heating + rec.n_cooling;

    rec.closure_residual = max_norm_distance(rec.dist_a_next, rec.dist_a);
    rec.closed = rec.closure_residual < spec.closure_tol;
    return rec;
}

LimitCycleResult find_limit_cycle(const CycleSpec& spec, double tol, int max_iters) {
    if (!(tol > 0.0))
        throw DomainError("limit-cycle tolerance must be positive");
    if (max_iters < 1)
        throw DomainError("limit-cycle iteration cap must be positive");

    CycleSpec working = spec;
    double residual = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        CycleRecord rec = run_cycle(working);
        residual = rec.closure_residual;
        if (residual < tol)
            return LimitCycleResult{rec, it, residual};
        working.initial = rec.dist_a_next;
    }
    std::ostringstream os;
    os << "limit cycle did not converge within " << max_iters
       << " iterations; last residual " << residual << " vs tol " << tol;
    throw SimulationError(os.str());
}

double first_law_residual(const CycleRecord& record) {
    return record.q_h + record.q_c + record.w_bc + record.w_da;
}

WorkEnsemble trajectory_work_ensemble(const CycleSpec& spec, std::size_t n_traj,
                                      std::uint64_t seed) {
    spec.validate();
    if (n_traj == 0)
        throw DomainError("ensemble needs at least one trajectory");

    const auto& f = spec.field;
    ContactPhase hot{Direction::heating, spec.tau_h_ms, f.b1_mG, spec.rates};
    ContactPhase cold{Direction::cooling, spec.tau_c_ms, f.b2_mG, spec.rates};

    WorkEnsemble we;
    we.n_traj = n_traj;
    double sw = 0.0, sw2 = 0.0, sq = 0.0, sq2 = 0.0;
    const double lambda = spec.coupling.lambda;
    for (std::size_t j = 0; j < n_traj; ++j) {
        SplitMix64 rng(SplitMix64::derive_stream(seed, j));
        double u = rng.next_unit();
        int a = constants::n_levels - 1;
        double acc = 0.0;
        for (int i = 0; i < constants::n_levels; ++i) {
            acc += spec.initial[i];
            if (u < acc) {
                a = i;
                break;
            }
        }
        TrajectoryRecord up = sample_trajectory(a, hot, rng);
        TrajectoryRecord downt = sample_trajectory(up.final_level, cold, rng);
        double dn_up = up.quanta();
        double dn_down = downt.quanta();
        double w = lambda * (f.b1_mG * dn_up - f.b2_mG * dn_down);
        double q = dn_up + dn_down;
        sw += w;
        sw2 += w * w;
        sq += q;
        sq2 += q * q;
    }
    double N = static_cast<double>(n_traj);
    we.mean_work = sw / N;
    we.mean_quanta = sq / N;
    we.var_work = n_traj > 1 ? (sw2 - sw * sw / N) / (N - 1.0) : 0.0;
    we.var_quanta = n_traj > 1 ? (sq2 - sq * sq / N) / (N - 1.0) : 0.0;
    return we;
}

} // namespace spinotto
