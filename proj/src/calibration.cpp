#include "thermoscope/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include "thermoscope/constants.hpp"
#include "thermoscope/errors.hpp"
#include "thermoscope/levmar.hpp"
#include "thermoscope/units.hpp"

namespace thermoscope {

namespace {

struct AxisAccumulator {
  double weight_sum = 0.0;
  double weighted_ratio_sum = 0.0;
  std::vector<double> ratios;
  std::vector<double> ratio_errs;
};

void accumulate(AxisAccumulator& acc, const DisplacementPair& pair) {
  if (pair.object_shift == 0.0)
    throw ValidationError("magnification: object shift must be nonzero");
  const double ratio = pair.image_shift / pair.object_shift;
  const double rel_img = pair.image_shift != 0.0 ? pair.image_err / pair.image_shift : 0.0;
  const double rel_obj = pair.object_err / pair.object_shift;
  double err = std::fabs(ratio) * std::sqrt(rel_img * rel_img + rel_obj * rel_obj);
  if (!(err > 0.0)) err = std::fabs(ratio) * 1e-6;  // exact inputs still need a weight
  const double w = 1.0 / (err * err);
  acc.weight_sum += w;
  acc.weighted_ratio_sum += w * ratio;
  acc.ratios.push_back(ratio);
  acc.ratio_errs.push_back(err);
}

}  // namespace

MagnificationResult magnification_from_pairs(const std::vector<DisplacementPair>& pairs) {
  AxisAccumulator x, y;
  for (const auto& pair : pairs) {
    if (pair.axis == 'x')
      accumulate(x, pair);
    else if (pair.axis == 'y')
      accumulate(y, pair);
    else
      throw ValidationError("magnification: axis must be 'x' or 'y'");
  }
  if (x.ratios.empty() || y.ratios.empty())
    throw ValidationError("magnification: need at least one displacement pair per axis");

  MagnificationResult r;
  r.mx = x.weighted_ratio_sum / x.weight_sum;
  r.mx_err = std::sqrt(1.0 / x.weight_sum);
  r.my = y.weighted_ratio_sum / y.weight_sum;
  r.my_err = std::sqrt(1.0 / y.weight_sum);
  r.m = std::sqrt((r.mx * r.mx + r.my * r.my) / 2.0);
  r.m_err = std::sqrt(r.mx * r.mx * r.mx_err * r.mx_err + r.my * r.my * r.my_err * r.my_err) /
            (2.0 * r.m);

  const auto scatter_flag = [](const AxisAccumulator& acc, double mean) {
    for (std::size_t i = 0; i < acc.ratios.size(); ++i)
      if (std::fabs(acc.ratios[i] - mean) > 5.0 * acc.ratio_errs[i]) return true;
    return false;
  };
  r.inconsistent = scatter_flag(x, r.mx) || scatter_flag(y, r.my);
  return r;
}

CentroidShift centroid_shift_from_frames(const ImageFrame& before, const ImageFrame& after) {
  const auto project_rows = [](const ImageFrame& f) {
    std::vector<double> profile(f.height_px, 0.0);
    for (int yy = 0; yy < f.height_px; ++yy)
      for (int xx = 0; xx < f.width_px; ++xx) profile[yy] += f.at(yy, xx);
    return profile;
  };

  const GaussianFit1D bx = fit_gaussian_1d(project_columns(before));
  const GaussianFit1D ax = fit_gaussian_1d(project_columns(after));
  const GaussianFit1D by = fit_gaussian_1d(project_rows(before));
  const GaussianFit1D ay = fit_gaussian_1d(project_rows(after));

  CentroidShift shift;
  shift.dx = (ax.center - bx.center) * before.pixel_pitch;
  shift.dx_err = std::hypot(ax.center_err, bx.center_err) * before.pixel_pitch;
  shift.dy = (ay.center - by.center) * before.pixel_pitch;
  shift.dy_err = std::hypot(ay.center_err, by.center_err) * before.pixel_pitch;
  return shift;
}

void G2Histogram::validate() const {
  if (bin_centers.size() != values.size())
    throw ValidationError("g2 histogram: bin_centers/values size mismatch");
  if (bin_centers.size() < 16) throw ValidationError("g2 histogram: too few bins");
  if (!(bin_width > 0.0)) throw ValidationError("g2 histogram: bin width must be > 0");
  for (double v : values)
    if (!(v >= 0.0)) throw ValidationError("g2 histogram: values must be nonnegative");
}

double g2_model(double t, double bg, double amplitude, double omega_prime, double t0,
                double tau) {
  const double dt = t - t0;
  const double osc = std::cos(0.5 * omega_prime * dt);
  return bg - amplitude * (osc * osc - 0.5) * std::exp(-std::fabs(dt) / tau);
}

namespace {

struct G2Seed {
  double bg, amplitude, omega_prime, t0, tau;  // natural units: value, value, rad/ns, ns, ns
};

// Self-seeding on the (ns, rad/ns) scale.  omega' comes from the dominant
// discrete-spectrum peak of (values - bg).
G2Seed seed_g2(const std::vector<double>& t_ns, const std::vector<double>& v,
               double bin_ns) {
  const std::size_t n = v.size();

  // Background: mean of the last 15% of bins (far tail, oscillation decayed).
  const std::size_t tail_start = n - std::max<std::size_t>(4, n * 15 / 100);
  double bg = 0.0;
  for (std::size_t j = tail_start; j < n; ++j) bg += v[j];
  bg /= static_cast<double>(n - tail_start);

  // t0: the model's global minimum sits at t = t0.
  std::size_t min_idx = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (v[j] < v[min_idx]) min_idx = j;
  const double t0 = t_ns[min_idx];

  std::vector<double> dev(n);
  double max_dev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    dev[j] = v[j] - bg;
    max_dev = std::max(max_dev, std::fabs(dev[j]));
  }

  // Discrete spectrum over [2 pi / span, pi / bin); 4x oversampled grid.
  const double span = t_ns.back() - t_ns.front();
  const double w_min = 2.0 * constants::pi / span;
  const double w_max = constants::pi / bin_ns;
  const std::size_t grid = 4 * n;
  std::vector<double> power(grid, 0.0);
  double peak = 0.0;
  std::size_t peak_idx = 0;
  for (std::size_t gi = 0; gi < grid; ++gi) {
    const double w = w_min + (w_max - w_min) * static_cast<double>(gi) / static_cast<double>(grid - 1);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      acc += dev[j] * std::exp(std::complex<double>(0.0, -w * t_ns[j]));
    power[gi] = std::abs(acc);
    if (power[gi] > peak) {
      peak = power[gi];
      peak_idx = gi;
    }
  }
  std::vector<double> sorted = power;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double floor = sorted[sorted.size() / 2];
  if (!(peak > 3.0 * floor) || peak == 0.0)
    throw SeedFailureError("g2 fit: no spectral peak above 3x the noise floor");
  const double omega_prime =
      w_min + (w_max - w_min) * static_cast<double>(peak_idx) / static_cast<double>(grid - 1);

  // Envelope decay: first moment of |t - t0| under |values - bg|.
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::fabs(dev[j]);
    num += w * std::fabs(t_ns[j] - t0);
    den += w;
  }
  double tau = den > 0.0 ? num / den : span / 4.0;
  tau = std::clamp(tau, bin_ns, span);

  return {bg, 2.0 * max_dev, omega_prime, t0, tau};
}

}  // namespace

G2FitResult fit_g2(const G2Histogram& hist, const std::optional<G2FitResult>& initial_guess,
                   const std::vector<double>& bin_errors) {
  hist.validate();
  const bool weighted = !bin_errors.empty();
  if (weighted && bin_errors.size() != hist.values.size())
    throw ValidationError("g2 fit: bin_errors size mismatch");

  const std::size_t n = hist.values.size();
  std::vector<double> t_ns(n);
  for (std::size_t j = 0; j < n; ++j) t_ns[j] = units::s_to_ns(hist.bin_centers[j]);
  const double bin_ns = units::s_to_ns(hist.bin_width);

  G2Seed seed{};
  if (initial_guess) {
    seed = {initial_guess->bg, initial_guess->amplitude,
            units::rad_s_to_rad_ns(initial_guess->omega_prime),
            units::s_to_ns(initial_guess->t0), units::s_to_ns(initial_guess->tau)};
  } else {
    seed = seed_g2(t_ns, hist.values, bin_ns);
  }

  const auto residual = [&](const std::vector<double>& q, std::vector<double>& r) {
    const double bg = q[0], a = q[1], w = q[2], t0 = q[3], tau = std::fabs(q[4]);
    for (std::size_t j = 0; j < n; ++j) {
      const double dt = t_ns[j] - t0;
      const double osc = std::cos(0.5 * w * dt);
      const double model = bg - a * (osc * osc - 0.5) * std::exp(-std::fabs(dt) / std::max(tau, 1e-9));
      r[j] = hist.values[j] - model;
      if (weighted) r[j] /= bin_errors[j];
    }
  };

  LevMarResult res = fit_least_squares(
      residual, n, {seed.bg, seed.amplitude, seed.omega_prime, seed.t0, seed.tau}, {});

  G2FitResult fit;
  fit.bg = res.params[0];
  fit.bg_err = res.std_errors[0];
  fit.amplitude = res.params[1];
  fit.amplitude_err = res.std_errors[1];
  fit.omega_prime = units::rad_ns_to_rad_s(std::fabs(res.params[2]));
  fit.omega_prime_err = units::rad_ns_to_rad_s(res.std_errors[2]);
  fit.t0 = units::ns_to_s(res.params[3]);
  fit.t0_err = units::ns_to_s(res.std_errors[3]);
  fit.tau = units::ns_to_s(std::fabs(res.params[4]));
  fit.tau_err = units::ns_to_s(res.std_errors[4]);
  fit.reduced_chi2 = res.reduced_chi2;
  fit.iterations = res.iterations;
  if (!(fit.tau > 0.0)) throw NumericalError("g2 fit: converged to tau <= 0");
  return fit;
}

double on_resonance_rabi(double omega_prime, double detuning) {
  const double wp = std::fabs(omega_prime);
  const double d = std::fabs(detuning);
  if (wp < d)
    throw ImaginaryResultError(
        "on_resonance_rabi: omega' < |detuning|, calibration point violated omega' >> |detuning|");
  return std::sqrt(wp * wp - d * d);
}

double on_resonance_rabi_err(double omega_prime, double omega_prime_err, double detuning) {
  const double omega = on_resonance_rabi(omega_prime, detuning);
  if (omega == 0.0) return omega_prime_err;
  return std::fabs(omega_prime) * omega_prime_err / omega;
}

double rabi_from_power(double power, double power_cal, double omega_cal) {
  if (!(power >= 0.0)) throw ValidationError("rabi_from_power: power must be >= 0");
  if (!(power_cal > 0.0)) throw ValidationError("rabi_from_power: calibration power must be > 0");
  return omega_cal * std::sqrt(power / power_cal);
}

namespace {

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path,
                                                    const std::string& what) {
  std::ifstream in(path);
  if (!in) throw ValidationError(what + ": cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t\r"));
      cell.erase(cell.find_last_not_of(" \t\r") + 1);
      cells.push_back(cell);
    }
    if (!cells.empty()) rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_number(const std::string& cell, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": bad number '" + cell + "'");
  }
}

bool looks_like_header(const std::vector<std::string>& cells) {
  for (const auto& c : cells) {
    try {
      std::size_t used = 0;
      (void)std::stod(c, &used);
      if (used == c.size()) return false;
    } catch (const std::exception&) {
    }
  }
  return true;
}

}  // namespace

G2Histogram load_g2_csv(const std::string& path) {
  auto rows = read_csv_rows(path, "g2 csv");
  if (!rows.empty() && looks_like_header(rows.front())) rows.erase(rows.begin());
  if (rows.empty()) throw ValidationError("g2 csv: no data rows in '" + path + "'");

  G2Histogram hist;
  for (const auto& cells : rows) {
    if (cells.size() < 2)
      throw ValidationError("g2 csv: expected tau_ns,g2_value rows in '" + path + "'");
    hist.bin_centers.push_back(units::ns_to_s(parse_number(cells[0], "g2 csv")));
    hist.values.push_back(parse_number(cells[1], "g2 csv"));
  }
  if (hist.bin_centers.size() >= 2)
    hist.bin_width = hist.bin_centers[1] - hist.bin_centers[0];
  hist.validate();
  return hist;
}

std::vector<DisplacementPair> load_displacement_pairs_csv(const std::string& path) {
  auto rows = read_csv_rows(path, "displacement csv");
  if (!rows.empty() && looks_like_header(rows.front())) rows.erase(rows.begin());
  if (rows.empty()) throw ValidationError("displacement csv: no data rows in '" + path + "'");

  std::vector<DisplacementPair> pairs;
  for (const auto& cells : rows) {
    if (cells.size() < 5)
      throw ValidationError(
          "displacement csv: expected axis,object_shift_nm,object_err_nm,image_shift_um,image_err_um");
    DisplacementPair p;
    if (cells[0] != "x" && cells[0] != "y")
      throw ValidationError("displacement csv: axis must be x or y");
    p.axis = cells[0][0];
    p.object_shift = units::nm_to_m(parse_number(cells[1], "displacement csv"));
    p.object_err = units::nm_to_m(parse_number(cells[2], "displacement csv"));
    p.image_shift = units::um_to_m(parse_number(cells[3], "displacement csv"));
    p.image_err = units::um_to_m(parse_number(cells[4], "displacement csv"));
    pairs.push_back(p);
  }
  return pairs;
}

}  // namespace thermoscope
