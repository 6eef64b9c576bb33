#include <cmath>

#include "spinotto/errors.hpp"
#include "spinotto/thermo.hpp"

namespace spinotto {

double heat_engine_side(const LevelDistribution& initial, const LevelDistribution& final_,
                        double b_mG, const CouplingConstants& c) {
    if (!(b_mG > 0.0))
        throw DomainError("field must be positive");
    return (mean_level(final_) - mean_level(initial)) * c.lambda * b_mG;
}

double work_stroke(const LevelDistribution& dist, double b_from_mG, double b_to_mG,
                   const CouplingConstants& c) {
    if (!(b_from_mG > 0.0) || !(b_to_mG > 0.0))
        throw DomainError("fields must be positive");
    return mean_level(dist) * c.lambda * (b_to_mG - b_from_mG);
}

HeatLedger make_heat_ledger(double q_h, double q_c, const CouplingConstants& c) {
    HeatLedger l;
    l.q_h = q_h;
    l.q_c = q_c;
    double g = c.gamma();
    l.q1 = q_h / g;
    l.q2 = q_c / g;
    l.q_l = (l.q1 - std::abs(l.q2)) - (q_h - std::abs(q_c));
    return l;
}

double heat_leak(const LevelDistribution& dist_a, const LevelDistribution& dist_b,
                 const FieldSchedule& field, const CouplingConstants& c) {
    field.validate();
    return (mean_level(dist_b) - mean_level(dist_a)) * (c.kappa - c.lambda) *
           (field.b1_mG - field.b2_mG);
}

std::optional<double> efficiency(const HeatLedger& ledger) {
    double denom = ledger.q_h + ledger.q_l;
    if (!(denom > 0.0))
        return std::nullopt;
    return (ledger.q_h - std::abs(ledger.q_c)) / denom;
}

std::optional<double> internal_efficiency(double q_h, double q_c) {
    if (!(q_h > 0.0))
        return std::nullopt;
    return 1.0 - std::abs(q_c) / q_h;
}

double closed_cycle_efficiency(const FieldSchedule& field, const CouplingConstants& c) {
    field.validate();
    double g = c.gamma();
    double db = field.b1_mG - field.b2_mG;
    return g * db / (db + g * field.b2_mG);
}

double otto_efficiency_bound(const FieldSchedule& field) {
    field.validate();
    return 1.0 - field.b2_mG / field.b1_mG;
}

double cycle_power(double produced_work, double tau_cycle_ms) {
    if (!(tau_cycle_ms > 0.0))
        throw DomainError("cycle time must be positive");
    return produced_work / tau_cycle_ms;
}

double work_fluctuations(const LevelDistribution& dist_a, const LevelDistribution& dist_b,
                         const LevelDistribution& dist_c, const LevelDistribution& dist_d,
                         const FieldSchedule& field, const CouplingConstants& c) {
    field.validate();
    return energy_variance(dist_a, field.b1_mG, c) + energy_variance(dist_b, field.b1_mG, c) +
           energy_variance(dist_c, field.b2_mG, c) + energy_variance(dist_d, field.b2_mG, c);
}

std::optional<double> fano_factor(double sigma_p_sq, double power) {
    if (!(power > 0.0))
        return std::nullopt;
    return sigma_p_sq / power;
}

} // namespace spinotto
