#pragma once

#include "spinotto/constants.hpp"

namespace spinotto {

// Zeeman coupling of the working medium (lambda, F=3 ground manifold with
// g_F = 1/4) and of the bath atoms (kappa, F=1 with g_F = 1/2), both in
// k_B nK per mG.  gamma = lambda/kappa sets the heat-leak ratio: each quantum
// handed to the medium costs the bath kappa*B while the medium only absorbs
// lambda*B of it.
struct CouplingConstants {
    double lambda;
    double kappa;

    double gamma() const { return lambda / kappa; }
    double g_medium() const { return lambda / constants::mu_bohr_nK_per_mG; }
    double g_bath() const { return kappa / constants::mu_bohr_nK_per_mG; }

    static CouplingConstants from_g_factors(double g_medium, double g_bath);
    static CouplingConstants standard(); // g = 1/4 and 1/2
};

} // namespace spinotto
