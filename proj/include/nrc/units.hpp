#pragma once

// Unit system (hbar = 1).
//
// Two-level runs use milliseconds for time; frequencies quoted in kHz are
// used directly as ms^-1.  Oscillator runs use microseconds and angstroms;
// angular frequencies are rad/us and masses are expressed in hbar*us/A^2.

#include <numbers>

namespace nrc::units {

inline constexpr double pi = std::numbers::pi;

inline constexpr double hbar_si = 1.054571817e-34;      // J s
inline constexpr double atomic_mass_si = 1.66053906660e-27;  // kg
inline constexpr double calcium40_mass_u = 39.9626;

// kg -> hbar * us / A^2
inline constexpr double kg_to_oscillator_mass = 1.0 / (hbar_si * 1e-6 / 1e-20);

// Default oscillator mass: 100 Ca-40 ions.
inline constexpr double default_ion_mass =
    100.0 * calcium40_mass_u * atomic_mass_si * kg_to_oscillator_mass;

// MHz (cycles) -> rad/us
constexpr double mhz_to_angular(double nu_mhz) { return 2.0 * pi * nu_mhz; }

// Rates quoted in Hz (s^-1, any length power) -> us^-1
constexpr double hz_to_per_us(double rate_hz) { return rate_hz * 1e-6; }

}  // namespace nrc::units
