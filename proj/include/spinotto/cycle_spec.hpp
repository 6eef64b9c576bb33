#pragma once

#include "spinotto/coupling.hpp"
#include "spinotto/level_distribution.hpp"
#include "spinotto/rate_table.hpp"

namespace spinotto {

// Field program for one Otto cycle: contact with the hot bath happens at the
// high field b1, contact with the cold bath at the low field b2, joined by
// linear ramps of duration ramp_ms.
struct FieldSchedule {
    double b1_mG = 346.5;
    double b2_mG = 31.6;
    double ramp_ms = 10.0;

    void validate() const; // b1 > b2 > 0, ramp_ms >= 0
};

// Full parameter set for one cycle.  bath_swap_ms is the experimental dead
// time for exchanging the bath species; the dynamics treat the swap as
// instantaneous and it is excluded from the thermodynamic cycle time.
struct CycleSpec {
    double tau_h_ms = 450.0;
    double tau_c_ms = 450.0;
    FieldSchedule field{};
    RateTable rates = RateTable::default_calibrated();
    CouplingConstants coupling = CouplingConstants::standard();
    LevelDistribution initial = LevelDistribution::polarized();
    double bath_swap_ms = 4.4;
    double adiabaticity_threshold = 0.05;
    double closure_tol = 1e-10;

    double cycle_time_ms() const { return tau_h_ms + tau_c_ms + 2.0 * field.ramp_ms; }

    void validate() const;
};

} // namespace spinotto
