#include "thermoscope/physics.hpp"

#include <cmath>

#include "thermoscope/constants.hpp"
#include "thermoscope/errors.hpp"

namespace thermoscope {

namespace {
constexpr double kHbar = constants::hbar;
constexpr double kBoltzmann = constants::boltzmann;

double saturation_denominator(const LaserSetting& laser, double gamma) {
  return 4.0 * laser.detuning * laser.detuning + gamma * gamma +
         2.0 * laser.rabi * laser.rabi;
}
}  // namespace

double excited_state_population(const LaserSetting& laser, double gamma) {
  laser.validate();
  if (!(gamma > 0.0)) throw ValidationError("excited_state_population: gamma must be > 0");
  if (laser.rabi == 0.0) return 0.0;
  return laser.rabi * laser.rabi / saturation_denominator(laser, gamma);
}

double cooling_power(double temperature, const LaserSetting& laser,
                     const ExperimentParams& p) {
  p.validate();
  laser.validate();
  if (!(laser.detuning < 0.0))
    throw ValidationError("cooling_power: detuning must be negative (red) for cooling");
  if (!(temperature >= 0.0)) throw ValidationError("cooling_power: temperature must be >= 0");

  // rho_ee^2 / rabi^2 = rabi^2 / (4 det^2 + gamma^2 + 2 rabi^2)^2, finite at
  // rabi = 0.
  const double denom = saturation_denominator(laser, p.gamma);
  const double rho_over_rabi = laser.rabi / denom;  // units 1/(rad/s)
  const double keff = p.effective_wavenumber();
  return 8.0 * kHbar * keff * keff * laser.detuning * p.gamma *
         (kBoltzmann * temperature / p.mass) * rho_over_rabi * rho_over_rabi;
}

double heating_power(const LaserSetting& laser, const ExperimentParams& p,
                     const HeatingRate& h) {
  p.validate();
  laser.validate();
  h.validate();
  const double rho = laser.rabi == 0.0
                         ? 0.0
                         : laser.rabi * laser.rabi / saturation_denominator(laser, p.gamma);
  const double k = p.wavenumber();
  const double keff = p.effective_wavenumber();
  const double recoil = rho * p.gamma / (2.0 * p.mass) *
                        (kHbar * kHbar * keff * keff + p.xi * kHbar * kHbar * k * k);
  return recoil + h.zeta * kHbar * p.trap_omega;
}

double equilibrium_temperature(const LaserSetting& laser, const ExperimentParams& p,
                               const HeatingRate& h) {
  p.validate();
  laser.validate();
  h.validate();
  if (!(laser.detuning < 0.0))
    throw ValidationError("equilibrium_temperature: detuning must be negative (red)");
  if (laser.rabi == 0.0 && h.zeta > 0.0)
    throw ValidationError(
        "equilibrium_temperature: rabi = 0 with zeta > 0 diverges (no scattering removes the anomalous heat)");

  const double abs_det = -laser.detuning;
  const double sat = saturation_denominator(laser, p.gamma);
  const double cos_alpha = std::cos(p.alpha);
  const double geometry = 1.0 + p.xi / (cos_alpha * cos_alpha);

  // Doppler part of the balance; the rabi = 0 value is the small-drive limit.
  double t = kHbar * sat * geometry / (16.0 * abs_det * kBoltzmann);

  if (h.zeta > 0.0) {
    const double keff = p.effective_wavenumber();
    t += h.zeta * p.trap_omega * p.mass * sat * sat /
         (8.0 * keff * keff * abs_det * p.gamma * laser.rabi * laser.rabi * kBoltzmann);
  }
  return t;
}

double doppler_limit(double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("doppler_limit: gamma must be > 0");
  return kHbar * gamma / (2.0 * kBoltzmann);
}

double ground_state_spread(const ExperimentParams& p) {
  p.validate();
  return std::sqrt(kHbar / (2.0 * p.mass * p.trap_omega));
}

ThermalState thermal_state_from_nbar(double nbar, const ExperimentParams& p) {
  p.validate();
  if (!(nbar >= 0.0)) throw ValidationError("thermal state: nbar must be >= 0");
  ThermalState s;
  s.nbar = nbar;
  s.temperature = nbar * kHbar * p.trap_omega / kBoltzmann;
  s.sigma_ion = std::sqrt(kHbar * (2.0 * nbar + 1.0) / (2.0 * p.mass * p.trap_omega));
  return s;
}

ThermalState thermal_state_from_temperature(double temperature, const ExperimentParams& p) {
  if (!(temperature >= 0.0)) throw ValidationError("thermal state: temperature must be >= 0");
  p.validate();
  return thermal_state_from_nbar(kBoltzmann * temperature / (kHbar * p.trap_omega), p);
}

ThermalState thermal_state_from_sigma(double sigma_ion, const ExperimentParams& p) {
  p.validate();
  const double ground = ground_state_spread(p);
  // Tolerate roundoff at the ground-state boundary.
  if (sigma_ion < ground * (1.0 - 1e-12))
    throw ValidationError("thermal state: sigma below the ground-state spread");
  double nbar = p.mass * p.trap_omega * sigma_ion * sigma_ion / kHbar - 0.5;
  if (nbar < 0.0) nbar = 0.0;
  return thermal_state_from_nbar(nbar, p);
}

}  // namespace thermoscope
