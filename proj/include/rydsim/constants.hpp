#pragma once

// Physical constants (SI, CODATA 2018) and unit helpers.
//
// Internal unit conventions used throughout the library:
//   * all frequencies, Rabi couplings, detunings and decay rates are angular
//     (rad/s); configuration files use ordinary frequencies in MHz and are
//     multiplied by 2*pi on load,
//   * lengths in metres, times in seconds, temperatures in kelvin,
//   * hbar = 1 inside the dynamics (Hamiltonians are stored in rad/s).

#include <numbers>

namespace rydsim::consts {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double kB = 1.380649e-23;       // J/K
inline constexpr double muB = 9.2740100783e-24;  // J/T
inline constexpr double amu = 1.66053906660e-27; // kg

inline constexpr double massRb87 = 86.909180531 * amu;
inline constexpr double massCs133 = 132.905451961 * amu;

// Electron / nuclear g-factors entering the ground-state clock shift (Rb-87).
inline constexpr double gS = 2.0023193043622;
inline constexpr double gI_Rb87 = -0.0009951414;

// Frequency conversions.
inline constexpr double MHz = two_pi * 1.0e6;    // MHz -> rad/s
inline constexpr double kHz = two_pi * 1.0e3;    // kHz -> rad/s
inline constexpr double GHz = two_pi * 1.0e9;    // GHz -> rad/s

// Length / time / temperature conversions.
inline constexpr double um = 1.0e-6;  // micrometres -> m
inline constexpr double nm = 1.0e-9;  // nanometres -> m
inline constexpr double ns = 1.0e-9;  // nanoseconds -> s
inline constexpr double us = 1.0e-6;  // microseconds -> s
inline constexpr double uK = 1.0e-6;  // microkelvin -> K
inline constexpr double mK = 1.0e-3;  // millikelvin -> K

} // namespace rydsim::consts
