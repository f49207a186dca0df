#pragma once

#include "thermoscope/constants.hpp"

namespace thermoscope::units {

// All internal quantities are SI (rad/s, m, kg, K, quanta/s).  Frequencies
// quoted in MHz/kHz are ordinary frequencies nu and convert to angular
// omega = 2 pi nu.

inline constexpr double two_pi = 2.0 * constants::pi;

inline constexpr double mhz_to_rad_s(double mhz) { return two_pi * mhz * 1e6; }
inline constexpr double khz_to_rad_s(double khz) { return two_pi * khz * 1e3; }
inline constexpr double rad_s_to_mhz(double w) { return w / (two_pi * 1e6); }

inline constexpr double per_us_to_rad_s(double v) { return v * 1e6; }
inline constexpr double rad_s_to_per_us(double w) { return w * 1e-6; }
inline constexpr double rad_ns_to_rad_s(double v) { return v * 1e9; }
inline constexpr double rad_s_to_rad_ns(double w) { return w * 1e-9; }

inline constexpr double amu_to_kg(double amu) { return amu * constants::atomic_mass_unit; }
inline constexpr double deg_to_rad(double deg) { return deg * constants::pi / 180.0; }

inline constexpr double nm_to_m(double nm) { return nm * 1e-9; }
inline constexpr double um_to_m(double um) { return um * 1e-6; }
inline constexpr double m_to_um(double m) { return m * 1e6; }
inline constexpr double ns_to_s(double ns) { return ns * 1e-9; }
inline constexpr double s_to_ns(double s) { return s * 1e9; }

// Anomalous heating rates are quoted in quanta/ms at the I/O surface and
// carried internally in quanta/s.
inline constexpr double quanta_per_ms_to_per_s(double q) { return q * 1e3; }
inline constexpr double quanta_per_s_to_per_ms(double q) { return q * 1e-3; }

}  // namespace thermoscope::units
