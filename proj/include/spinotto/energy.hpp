#pragma once

#include "spinotto/coupling.hpp"
#include "spinotto/level_distribution.hpp"

namespace spinotto {

// Zeeman energy of level n at field b (k_B nK): E_n = n * lambda * b.
// The ground level n = 0 defines the zero of energy.
double zeeman_energy(int level, double b_mG, const CouplingConstants& c);

// <E> and Var(E) of a level distribution at field b.
double mean_energy(const LevelDistribution& dist, double b_mG, const CouplingConstants& c);
double energy_variance(const LevelDistribution& dist, double b_mG, const CouplingConstants& c);

} // namespace spinotto
