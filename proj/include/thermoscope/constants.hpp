#pragma once

namespace thermoscope::constants {

// CODATA 2018 values; k_B is exact in the 2019 SI.
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace thermoscope::constants
