#include "thermoscope/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thermoscope/constants.hpp"
#include "thermoscope/errors.hpp"
#include "thermoscope/levmar.hpp"
#include "thermoscope/physics.hpp"
#include "thermoscope/units.hpp"

namespace thermoscope {

using nlohmann::json;

std::string scan_kind_name(ScanKind kind) {
  return kind == ScanKind::rabi_scan ? "rabi_scan" : "detuning_scan";
}

ScanKind scan_kind_from_name(const std::string& name) {
  if (name == "rabi_scan") return ScanKind::rabi_scan;
  if (name == "detuning_scan") return ScanKind::detuning_scan;
  throw ValidationError("scan kind must be rabi_scan or detuning_scan, got '" + name + "'");
}

void ScanDataset::validate() const {
  if (points.size() < 4)
    throw ValidationError("scan dataset: need at least 4 points for the 2-parameter fit");
  std::set<double> controls;
  for (const auto& pt : points) {
    if (!(pt.sigma_err > 0.0))
      throw ValidationError("scan dataset: width uncertainties must be > 0");
    if (!(pt.sigma > 0.0)) throw ValidationError("scan dataset: widths must be > 0");
    controls.insert(pt.control);
  }
  if (controls.size() != points.size())
    throw ValidationError("scan dataset: control values must be distinct");
}

double model_width(double control, ScanKind kind, double fixed_value, double zeta,
                   double sigma_psf, const ExperimentParams& p, double magnification) {
  LaserSetting laser;
  if (kind == ScanKind::rabi_scan) {
    laser.rabi = control;
    laser.detuning = fixed_value;
  } else {
    laser.rabi = fixed_value;
    laser.detuning = control;
  }
  const double t = equilibrium_temperature(laser, p, HeatingRate{zeta});
  const ThermalState state = thermal_state_from_temperature(t, p);
  const double scaled = magnification * state.sigma_ion;
  return std::sqrt(sigma_psf * sigma_psf + scaled * scaled);
}

HeatingFitResult fit_heating_rate(const ScanDataset& dataset, const ExperimentParams& p,
                                  double magnification) {
  dataset.validate();
  p.validate();
  if (!(magnification > 0.0))
    throw ValidationError("heating fit: magnification must be > 0");
  for (const auto& pt : dataset.points) {
    if (dataset.kind == ScanKind::rabi_scan && !(pt.control > 0.0))
      throw ValidationError("heating fit: rabi controls must be > 0");
    if (dataset.kind == ScanKind::rabi_scan && !(dataset.fixed_value < 0.0))
      throw ValidationError("heating fit: fixed detuning must be negative");
    if (dataset.kind == ScanKind::detuning_scan && !(pt.control < 0.0))
      throw ValidationError("heating fit: detuning controls must be negative");
    if (dataset.kind == ScanKind::detuning_scan && !(dataset.fixed_value > 0.0))
      throw ValidationError("heating fit: fixed rabi must be > 0");
  }

  const std::size_t n = dataset.points.size();

  // Optimize in square-root coordinates (zeta = u^2, sigma_psf = v^2) so both
  // bounds at zero stay unconstrained; u in sqrt(quanta/s), v in sqrt(m).
  const auto residual = [&](const std::vector<double>& q, std::vector<double>& r) {
    const double zeta = q[0] * q[0];
    const double psf = q[1] * q[1];
    for (std::size_t j = 0; j < n; ++j) {
      const auto& pt = dataset.points[j];
      const double model = model_width(pt.control, dataset.kind, dataset.fixed_value, zeta,
                                       psf, p, magnification);
      r[j] = (pt.sigma - model) / pt.sigma_err;
    }
  };

  // 4x4 log-spaced multi-start: zeta 0.01..10 quanta/ms, psf 0.5..50 um.
  std::vector<double> zeta_seeds, psf_seeds;
  for (int i = 0; i < 4; ++i) {
    zeta_seeds.push_back(units::quanta_per_ms_to_per_s(0.01 * std::pow(10.0, i)));
    psf_seeds.push_back(units::um_to_m(0.5 * std::pow(std::cbrt(100.0), i)));
  }

  LevMarOptions opt;
  opt.scale_covariance_by_reduced_chi2 = false;  // weights are true errors

  std::optional<LevMarResult> best;
  for (double zs : zeta_seeds) {
    for (double ps : psf_seeds) {
      try {
        LevMarResult res =
            fit_least_squares(residual, n, {std::sqrt(zs), std::sqrt(ps)}, opt);
        if (!best || res.chi2 < best->chi2) best = res;
      } catch (const NumericalError&) {
        continue;  // this start failed; others may converge
      }
    }
  }
  if (!best) throw FitConvergenceError("heating fit: no multi-start seed converged");

  const double zeta = best->params[0] * best->params[0];
  const double psf = best->params[1] * best->params[1];

  // Covariance in the original (zeta, sigma_psf) coordinates: weighted
  // Jacobian by central differences, well defined also when a parameter
  // converged to its zero bound.
  const auto model_at = [&](double z, double s, std::size_t j) {
    const auto& pt = dataset.points[j];
    return model_width(pt.control, dataset.kind, dataset.fixed_value, z, s, p, magnification);
  };
  const double hz = std::max(1e-6 * std::max(zeta, 1.0), 1e-9);
  const double hs = std::max(1e-6 * std::max(psf, 1e-6), 1e-15);
  std::vector<std::vector<double>> jac(n, std::vector<double>(2, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 1.0 / dataset.points[j].sigma_err;
    const double zlo = std::max(zeta - hz, 0.0);
    jac[j][0] = (model_at(zeta + hz, psf, j) - model_at(zlo, psf, j)) / (zeta + hz - zlo) * w;
    const double slo = std::max(psf - hs, 0.0);
    jac[j][1] = (model_at(zeta, psf + hs, j) - model_at(zeta, slo, j)) / (psf + hs - slo) * w;
  }

  // Rank check on the column-normalized Jacobian.
  double n0 = 0.0, n1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    n0 += jac[j][0] * jac[j][0];
    n1 += jac[j][1] * jac[j][1];
  }
  n0 = std::sqrt(n0);
  n1 = std::sqrt(n1);
  double a = 0.0, b = 0.0, d = 0.0;  // normalized J^T J
  if (n0 > 0.0 && n1 > 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      const double c0 = jac[j][0] / n0;
      const double c1 = jac[j][1] / n1;
      a += c0 * c0;
      b += c0 * c1;
      d += c1 * c1;
    }
  }
  const double tr = a + d;
  const double det = a * d - b * b;
  const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  const double eig_min = tr / 2.0 - disc;
  const double eig_max = tr / 2.0 + disc;
  if (!(n0 > 0.0) || !(n1 > 0.0) || !(eig_min > 1e-24 * eig_max))
    throw UnderDeterminedError(
        "heating fit: model Jacobian is rank deficient, the scan cannot separate zeta and sigma_psf");

  std::vector<std::vector<double>> jtj(2, std::vector<double>(2, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    jtj[0][0] += jac[j][0] * jac[j][0];
    jtj[0][1] += jac[j][0] * jac[j][1];
    jtj[1][1] += jac[j][1] * jac[j][1];
  }
  jtj[1][0] = jtj[0][1];
  const auto cov = invert_matrix(jtj);

  HeatingFitResult result;
  result.zeta = zeta;
  result.sigma_psf = psf;
  result.covariance = {{{cov[0][0], cov[0][1]}, {cov[1][0], cov[1][1]}}};
  result.zeta_err = std::sqrt(std::max(cov[0][0], 0.0));
  result.sigma_psf_err = std::sqrt(std::max(cov[1][1], 0.0));
  result.reduced_chi2 = best->chi2 / static_cast<double>(n - 2);
  result.residuals.resize(n);
  residual(best->params, result.residuals);
  return result;
}

TemperatureEstimate temperature_from_width(double sigma, double sigma_err,
                                           const ImagingConfig& cfg,
                                           const ExperimentParams& p) {
  cfg.validate();
  p.validate();
  if (!(sigma_err >= 0.0))
    throw ValidationError("temperature_from_width: sigma_err must be >= 0");

  const double sigma_ion = extract_ion_width(sigma, cfg);  // throws when unresolved
  const ThermalState state = thermal_state_from_sigma(sigma_ion, p);

  const double mag = cfg.magnification;
  const double r = mag * sigma_ion;  // sqrt(sigma^2 - psf^2)
  const double d_dsigma = sigma / (mag * r);
  const double d_dpsf = cfg.sigma_psf / (mag * r);
  const double d_dmag = sigma_ion / mag;
  const double var_sigma_ion = d_dsigma * d_dsigma * sigma_err * sigma_err +
                               d_dpsf * d_dpsf * cfg.sigma_psf_err * cfg.sigma_psf_err +
                               d_dmag * d_dmag * cfg.magnification_err * cfg.magnification_err;
  const double sigma_ion_err = std::sqrt(var_sigma_ion);

  const double dT_dsigma_ion =
      2.0 * p.mass * p.trap_omega * p.trap_omega * sigma_ion / constants::boltzmann;

  TemperatureEstimate est;
  est.temperature = state.temperature;
  est.nbar = state.nbar;
  est.temperature_err = dT_dsigma_ion * sigma_ion_err;
  est.nbar_err = est.temperature_err * constants::boltzmann / (constants::hbar * p.trap_omega);
  return est;
}

double minimum_measurable_temperature(const ImagingConfig& cfg, const ExperimentParams& p,
                                      double relative_error) {
  cfg.validate();
  p.validate();
  if (!(relative_error > 0.0))
    throw ValidationError("minimum_measurable_temperature: relative error must be > 0");

  const auto ratio_at = [&](double t) {
    const ThermalState state = thermal_state_from_temperature(t, p);
    const double sigma = composite_width(state.sigma_ion, cfg);
    const TemperatureEstimate est = temperature_from_width(sigma, 0.0, cfg, p);
    return est.temperature_err / est.temperature;
  };

  double lo = 1e-9, hi = 1.0;
  if (ratio_at(hi) >= relative_error)
    throw NumericalError("minimum_measurable_temperature: relative error never drops below target");
  if (ratio_at(lo) <= relative_error) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (ratio_at(mid) > relative_error)
      lo = mid;
    else
      hi = mid;
  }
  return std::sqrt(lo * hi);
}

namespace {

double control_to_si(ScanKind kind, double value, const ExperimentParams& p) {
  return kind == ScanKind::rabi_scan ? value * p.gamma : units::mhz_to_rad_s(value);
}

double control_from_si(ScanKind kind, double value, const ExperimentParams& p) {
  return kind == ScanKind::rabi_scan ? value / p.gamma : units::rad_s_to_mhz(value);
}

std::string sidecar_path(const std::string& csv_path) {
  const auto dot = csv_path.find_last_of('.');
  const std::string stem = dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
  return stem + ".json";
}

}  // namespace

void save_scan_dataset(const ScanDataset& dataset, const ExperimentParams& p,
                       const std::string& csv_path) {
  dataset.validate();
  const bool rabi = dataset.kind == ScanKind::rabi_scan;

  std::ofstream out(csv_path);
  if (!out) throw ValidationError("scan dataset: cannot write '" + csv_path + "'");
  out.precision(17);
  out << (rabi ? "rabi_Gamma" : "detuning_MHz") << ",sigma_um,sigma_err_um\n";
  for (const auto& pt : dataset.points)
    out << control_from_si(dataset.kind, pt.control, p) << ',' << units::m_to_um(pt.sigma)
        << ',' << units::m_to_um(pt.sigma_err) << '\n';

  json header;
  header["scan_kind"] = scan_kind_name(dataset.kind);
  header["fixed_value"] = rabi ? units::rad_s_to_mhz(dataset.fixed_value)
                               : dataset.fixed_value / p.gamma;
  header["fixed_units"] = rabi ? "MHz" : "Gamma";
  header["control_units"] = rabi ? "Gamma" : "MHz";
  header["sigma_units"] = "um";
  header["axis"] = dataset.axis;
  std::ofstream hdr(sidecar_path(csv_path));
  if (!hdr) throw ValidationError("scan dataset: cannot write '" + sidecar_path(csv_path) + "'");
  hdr << header.dump(2) << "\n";
}

ScanDataset load_scan_dataset(const ExperimentParams& p, const std::string& csv_path) {
  std::ifstream hdr_in(sidecar_path(csv_path));
  if (!hdr_in)
    throw ValidationError("scan dataset: missing JSON header '" + sidecar_path(csv_path) + "'");
  json header;
  try {
    hdr_in >> header;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scan dataset: bad JSON header: ") + e.what());
  }

  ScanDataset dataset;
  dataset.kind = scan_kind_from_name(header.at("scan_kind").get<std::string>());
  dataset.axis = header.value("axis", "x");
  const bool rabi = dataset.kind == ScanKind::rabi_scan;
  const double fixed_raw = header.at("fixed_value").get<double>();
  dataset.fixed_value = rabi ? units::mhz_to_rad_s(fixed_raw) : fixed_raw * p.gamma;

  std::ifstream in(csv_path);
  if (!in) throw ValidationError("scan dataset: cannot open '" + csv_path + "'");
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      if (line.find("sigma_um") != std::string::npos) continue;  // header row
    }
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ','))
      throw ValidationError("scan dataset: expected control,sigma_um,sigma_err_um rows");
    try {
      ScanPoint pt;
      pt.control = control_to_si(dataset.kind, std::stod(a), p);
      pt.sigma = units::um_to_m(std::stod(b));
      pt.sigma_err = units::um_to_m(std::stod(c));
      dataset.points.push_back(pt);
    } catch (const std::exception&) {
      throw ValidationError("scan dataset: bad numeric row '" + line + "'");
    }
  }
  dataset.validate();
  return dataset;
}

}  // namespace thermoscope
