#pragma once

#include "thermoscope/params.hpp"

namespace thermoscope {

// Steady-state excited-state population of the driven two-level ion,
// rho_ee = rabi^2 / (4 detuning^2 + gamma^2 + 2 rabi^2).  In [0, 1/2).
double excited_state_population(const LaserSetting& laser, double gamma);

// Doppler cooling power along the analyzed axis [W].  Negative for red
// detuning and T > 0; evaluates to 0 at rabi = 0 (cancelled form, the
// rho_ee^2 / rabi^2 ratio stays finite).  Requires detuning < 0 and T >= 0.
double cooling_power(double temperature, const LaserSetting& laser,
                     const ExperimentParams& p);

// Recoil heating from absorption and spontaneous emission plus the anomalous
// term zeta * hbar * trap_omega [W].  Nonnegative.
double heating_power(const LaserSetting& laser, const ExperimentParams& p,
                     const HeatingRate& h);

// Temperature at which cooling and heating powers balance [K].  Requires
// detuning < 0; rabi = 0 is allowed only with zeta = 0 (the small-drive limit
// is finite), otherwise the temperature diverges and a ValidationError is
// thrown.
double equilibrium_temperature(const LaserSetting& laser, const ExperimentParams& p,
                               const HeatingRate& h);

// k_B T = hbar gamma / 2.
double doppler_limit(double gamma);

// Conversions of the (nbar, T, sigma_i) triple; mutually inverse to 1e-9.
ThermalState thermal_state_from_temperature(double temperature, const ExperimentParams& p);
ThermalState thermal_state_from_nbar(double nbar, const ExperimentParams& p);
// Rejects sigma below the ground-state spread sqrt(hbar / (2 m omega)).
ThermalState thermal_state_from_sigma(double sigma_ion, const ExperimentParams& p);

// Ground-state RMS spread sqrt(hbar / (2 m omega)) [m].
double ground_state_spread(const ExperimentParams& p);

}  // namespace thermoscope
