#pragma once

#include <optional>

#include "spinotto/cycle_spec.hpp"
#include "spinotto/energy.hpp"

namespace spinotto {

// Sign convention: heats are signed from the working medium's point of view
// (absorbed > 0), works are signed energy changes of the medium during the
// ramps (w < 0 means the medium releases energy, i.e. produces work).  The
// scalar `w` reported in records and sweep rows is the produced work
// q_h - |q_c| >= 0 for engine operation.

// Heat exchanged with the bath during a contact at fixed field b:
// sum_n n (p_final - p_initial) lambda b.
double heat_engine_side(const LevelDistribution& initial, const LevelDistribution& final_,
                        double b_mG, const CouplingConstants& c);

// Work performed on/by the medium when the field ramps from b_from to b_to
// at frozen populations: sum_n n p_n lambda (b_to - b_from).
double work_stroke(const LevelDistribution& dist, double b_from_mG, double b_to_mG,
                   const CouplingConstants& c);

// Bath-side and medium-side heat bookkeeping for one cycle.  Each quantum
// moved at field b costs the bath kappa*b but changes the medium energy by
// lambda*b only; the mismatch is the collisional heat leak q_l.
struct HeatLedger {
    double q_h = 0.0; // medium-side heat, hot contact
    double q_c = 0.0; // medium-side heat, cold contact (<= 0 for an engine)
    double q1 = 0.0;  // bath-side heat, hot contact  (= q_h / gamma)
    double q2 = 0.0;  // bath-side heat, cold contact (= q_c / gamma)
    double q_l = 0.0; // (q1 - |q2|) - (q_h - |q_c|), exact by construction
};

HeatLedger make_heat_ledger(double q_h, double q_c, const CouplingConstants& c);

// Closed-form leak for a closed cycle with hot-contact endpoints a -> b:
// sum_n n (p_b - p_a) (kappa - lambda)(b1 - b2).  Assumes closure; the
// caller is responsible for having converged the cycle.
double heat_leak(const LevelDistribution& dist_a, const LevelDistribution& dist_b,
                 const FieldSchedule& field, const CouplingConstants& c);

// eta = (q_h - |q_c|) / (q_h + q_l).  Absent when the denominator is not
// positive (no heat drawn), rather than NaN, so outputs stay parseable.
std::optional<double> efficiency(const HeatLedger& ledger);

// eta_int = 1 - |q_c| / q_h, the internal (leak-free) efficiency.  Absent
// when q_h <= 0.
std::optional<double> internal_efficiency(double q_h, double q_c);

// Analytic closed-cycle values implied by the level structure alone.
double closed_cycle_efficiency(const FieldSchedule& field, const CouplingConstants& c);
double otto_efficiency_bound(const FieldSchedule& field); // 1 - b2/b1

double cycle_power(double produced_work, double tau_cycle_ms);

// Work-fluctuation estimator built from the four stroke-endpoint energy
// variances: sigma_w^2 = Var_a(b1) + Var_b(b1) + Var_c(b2) + Var_d(b2).
// Endpoint distributions are treated as independent, which ignores the
// correlation between a stroke's initial and final state; a trajectory-exact
// alternative is available via trajectory_work_ensemble in cycle.hpp.
double work_fluctuations(const LevelDistribution& dist_a, const LevelDistribution& dist_b,
                         const LevelDistribution& dist_c, const LevelDistribution& dist_d,
                         const FieldSchedule& field, const CouplingConstants& c);

// Fano factor of the power, F = sigma_p^2 / p.  Absent when p <= 0.
std::optional<double> fano_factor(double sigma_p_sq, double power);

} // namespace spinotto
