#pragma once

#include <numbers>

namespace spinread::constants {

// CODATA 2018, SI units.
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double planck = 6.62607015e-34;                  // J s
inline constexpr double hbar = planck / two_pi;                   // J s
inline constexpr double boltzmann = 1.380649e-23;                 // J / K
inline constexpr double elementary_charge = 1.602176634e-19;      // C
inline constexpr double bohr_magneton = 9.2740100783e-24;         // J / T
inline constexpr double vacuum_permeability = 1.25663706212e-6;   // N / A^2
inline constexpr double electron_mass = 9.1093837015e-31;         // kg

inline constexpr double free_electron_g = 2.00231930436256;

// 31P nuclear gyromagnetic ratio, 17.235 MHz/T expressed in rad s^-1 T^-1.
inline constexpr double gamma_p31 = two_pi * 17.235e6;

}  // namespace spinread::constants
