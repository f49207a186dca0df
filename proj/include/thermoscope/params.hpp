#pragma once

#include <string>

#include "thermoscope/constants.hpp"

namespace thermoscope {

// Single source of every physical symbol of the cooling model for one trap
// axis.  All fields SI.
struct ExperimentParams {
  double mass = 0.0;        // ion mass [kg]
  double gamma = 0.0;       // natural linewidth of the cooling transition [rad/s]
  double wavelength = 0.0;  // cooling transition wavelength [m]
  double trap_omega = 0.0;  // secular frequency of the analyzed axis [rad/s]
  double alpha = 0.0;       // angle between cooling beam and analyzed axis [rad]
  double xi = 1.0 / 3.0;    // emission geometry factor

  // Photon wave number k = 2 pi / wavelength and its projection on the axis.
  double wavenumber() const { return 2.0 * constants::pi / wavelength; }
  double effective_wavenumber() const;

  // Throws ValidationError on any violated invariant (mass/gamma/wavelength/
  // trap_omega > 0, 0 <= alpha < pi/2, 0 < xi <= 1).
  void validate() const;
};

// Reads/writes the JSON document format: SI values by default, or a "units"
// block choosing from {MHz, kHz, nm, amu, deg} per field.
ExperimentParams experiment_params_from_json_text(const std::string& text);
ExperimentParams load_experiment_params(const std::string& path);
std::string experiment_params_to_json_text(const ExperimentParams& p);
void save_experiment_params(const ExperimentParams& p, const std::string& path);

struct LaserSetting {
  double rabi = 0.0;      // on-resonance Rabi frequency [rad/s], >= 0
  double detuning = 0.0;  // laser minus atomic resonance [rad/s], < 0 is red

  void validate() const;  // rabi >= 0
};

struct HeatingRate {
  double zeta = 0.0;  // anomalous heating rate [quanta/s], >= 0

  void validate() const;
};

// (nbar, T, sigma_i) for one trap axis; the three fields are redundant by
// construction and always built together so they agree to 1e-9.
struct ThermalState {
  double nbar = 0.0;         // mean phonon number
  double temperature = 0.0;  // [K]
  double sigma_ion = 0.0;    // RMS position spread [m]
};

}  // namespace thermoscope
