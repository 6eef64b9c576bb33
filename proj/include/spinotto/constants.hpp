#pragma once

// Unit system used throughout the library:
//   magnetic field : mG
//   time           : ms
//   energy         : k_B * nK  (Zeeman splittings read directly as temperatures)
//   power          : k_B * nK / ms
// Rates are 1/ms.

namespace spinotto::constants {

// CODATA 2018
inline constexpr double mu_bohr_J_per_T = 9.2740100783e-24;
inline constexpr double k_boltzmann_J_per_K = 1.380649e-23;
inline constexpr double hbar_J_s = 1.054571817e-34;

// mu_B expressed in (k_B nK) per mG: mu_B * 1e-7 T/mG / k_B * 1e9 nK/K
inline constexpr double mu_bohr_nK_per_mG =
    mu_bohr_J_per_T * 1e-7 / k_boltzmann_J_per_K * 1e9;

// hbar * Bdot / (g mu_B B^2) with Bdot in mG/ms and B in mG picks up a factor
// 1e-4 (T/s per mG/ms) / 1e-14 (T^2 per mG^2) = 1e10.
inline constexpr double adiabaticity_unit_factor = 1e10;

inline constexpr int n_levels = 7;
inline constexpr int max_quanta = n_levels - 1;

inline constexpr char constants_version[] = "codata2018";

} // namespace spinotto::constants
