#include "thermoscope/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "thermoscope/constants.hpp"
#include "thermoscope/errors.hpp"
#include "thermoscope/levmar.hpp"
#include "thermoscope/log.hpp"
#include "thermoscope/units.hpp"

namespace thermoscope {

using nlohmann::json;

double ImageFrame::total() const {
  double s = 0.0;
  for (double v : counts) s += v;
  return s;
}

ImageFrame ImageFrame::zeros(int width, int height, double pitch) {
  ImageFrame f;
  f.width_px = width;
  f.height_px = height;
  f.pixel_pitch = pitch;
  f.counts.assign(static_cast<std::size_t>(width) * height, 0.0);
  return f;
}

void ImageFrame::validate() const {
  if (width_px <= 0 || height_px <= 0)
    throw ValidationError("image frame: dimensions must be positive");
  if (counts.size() != static_cast<std::size_t>(width_px) * height_px)
    throw ValidationError("image frame: counts size does not match dimensions");
  if (!(pixel_pitch > 0.0)) throw ValidationError("image frame: pixel pitch must be > 0");
  for (double v : counts)
    if (!(v >= 0.0)) throw ValidationError("image frame: counts must be nonnegative");
}

void ImagingConfig::validate() const {
  if (!(magnification > 0.0)) throw ValidationError("imaging config: magnification must be > 0");
  if (!(sigma_psf >= 0.0)) throw ValidationError("imaging config: sigma_psf must be >= 0");
  if (!(background >= 0.0)) throw ValidationError("imaging config: background must be >= 0");
  if (!(gain > 0.0)) throw ValidationError("imaging config: gain must be > 0");
  if (!(read_noise >= 0.0)) throw ValidationError("imaging config: read_noise must be >= 0");
  if (!(pixel_pitch > 0.0)) throw ValidationError("imaging config: pixel_pitch must be > 0");
  if (frame_width <= 0 || frame_height <= 0)
    throw ValidationError("imaging config: frame dimensions must be positive");
  if (!(magnification_err >= 0.0) || !(sigma_psf_err >= 0.0))
    throw ValidationError("imaging config: uncertainties must be >= 0");
}

ImagingConfig imaging_config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("imaging config: JSON parse failure: ") + e.what());
  }
  json units_block = doc.value("units", json::object());
  const auto length = [&](const char* field, double fallback) {
    if (!doc.contains(field)) return fallback;
    double v = doc[field].get<double>();
    std::string unit = units_block.contains(field) ? units_block[field].get<std::string>() : "m";
    if (unit == "um") return units::um_to_m(v);
    if (unit == "nm") return units::nm_to_m(v);
    if (unit == "m") return v;
    throw ValidationError(std::string("imaging config: unsupported unit for ") + field);
  };

  ImagingConfig cfg;
  cfg.magnification = doc.value("magnification", 1.0);
  cfg.magnification_err = doc.value("magnification_err", 0.0);
  cfg.sigma_psf = length("sigma_psf", 0.0);
  cfg.sigma_psf_err = length("sigma_psf_err", 0.0);
  cfg.background = doc.value("background", 0.0);
  cfg.gain = doc.value("gain", 1.0);
  cfg.read_noise = doc.value("read_noise", 0.0);
  cfg.pixel_pitch = length("pixel_pitch", 4e-6);
  cfg.frame_width = doc.value("frame_width", 256);
  cfg.frame_height = doc.value("frame_height", 256);
  cfg.validate();
  return cfg;
}

ImagingConfig load_imaging_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("imaging config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return imaging_config_from_json_text(buf.str());
}

std::string imaging_config_to_json_text(const ImagingConfig& cfg) {
  json doc;
  doc["magnification"] = cfg.magnification;
  doc["magnification_err"] = cfg.magnification_err;
  doc["sigma_psf"] = cfg.sigma_psf;
  doc["sigma_psf_err"] = cfg.sigma_psf_err;
  doc["background"] = cfg.background;
  doc["gain"] = cfg.gain;
  doc["read_noise"] = cfg.read_noise;
  doc["pixel_pitch"] = cfg.pixel_pitch;
  doc["frame_width"] = cfg.frame_width;
  doc["frame_height"] = cfg.frame_height;
  doc["units"] = {{"sigma_psf", "m"}, {"sigma_psf_err", "m"}, {"pixel_pitch", "m"}};
  return doc.dump(2) + "\n";
}

double composite_width(double sigma_ion, const ImagingConfig& cfg) {
  cfg.validate();
  if (!(sigma_ion >= 0.0)) throw ValidationError("composite_width: sigma_ion must be >= 0");
  const double scaled = cfg.magnification * sigma_ion;
  return std::sqrt(cfg.sigma_psf * cfg.sigma_psf + scaled * scaled);
}

double extract_ion_width(double sigma_image, const ImagingConfig& cfg) {
  cfg.validate();
  if (!(sigma_image > 0.0)) throw ValidationError("extract_ion_width: sigma_image must be > 0");
  if (sigma_image <= cfg.sigma_psf)
    throw DeconvolutionError("extract_ion_width: image width <= PSF width, source unresolved");
  const double diff = sigma_image * sigma_image - cfg.sigma_psf * cfg.sigma_psf;
  return std::sqrt(diff) / cfg.magnification;
}

ImageFrame rotate_nearest(const ImageFrame& frame, double angle_rad) {
  frame.validate();
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  const int w = frame.width_px;
  const int h = frame.height_px;

  int out_w = static_cast<int>(std::ceil(std::fabs(c) * w + std::fabs(s) * h));
  int out_h = static_cast<int>(std::ceil(std::fabs(s) * w + std::fabs(c) * h));
  // Keep canvas parity equal to the source so lattice centers coincide.
  if ((out_w - w) % 2 != 0) ++out_w;
  if ((out_h - h) % 2 != 0) ++out_h;

  ImageFrame out = ImageFrame::zeros(out_w, out_h, frame.pixel_pitch);
  const double cx_src = 0.5 * (w - 1);
  const double cy_src = 0.5 * (h - 1);
  const double cx_dst = 0.5 * (out_w - 1);
  const double cy_dst = 0.5 * (out_h - 1);

  for (int y = 0; y < out_h; ++y) {
    const double dy = y - cy_dst;
    for (int x = 0; x < out_w; ++x) {
      const double dx = x - cx_dst;
      // Inverse rotation of the output pixel into source coordinates.
      const double xs = c * dx + s * dy + cx_src;
      const double ys = -s * dx + c * dy + cy_src;
      const long xi = std::lround(xs);
      const long yi = std::lround(ys);
      if (xi < 0 || xi >= w || yi < 0 || yi >= h) continue;
      out.at(y, x) = frame.at(static_cast<int>(yi), static_cast<int>(xi));
    }
  }
  return out;
}

ImageFrame rotate_45_nearest(const ImageFrame& frame) {
  return rotate_nearest(frame, constants::pi / 4.0);
}

std::vector<double> project_columns(const ImageFrame& frame) {
  frame.validate();
  std::vector<double> profile(frame.width_px, 0.0);
  for (int x = 0; x < frame.width_px; ++x) {
    double s = 0.0;
    for (int y = 0; y < frame.height_px; ++y) s += frame.at(y, x);
    profile[x] = s;
  }
  return profile;
}

namespace {

GaussianFit1D moment_seed(const std::vector<double>& profile) {
  const double offset = *std::min_element(profile.begin(), profile.end());
  double mass = 0.0, first = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const double w = profile[j] - offset;
    mass += w;
    first += w * static_cast<double>(j);
  }
  if (!(mass > 0.0))
    throw DegenerateProfileError("gaussian fit: flat profile, moment seed undefined");
  const double center = first / mass;
  double second = 0.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const double d = static_cast<double>(j) - center;
    second += (profile[j] - offset) * d * d;
  }
  const double sigma = std::sqrt(second / mass);
  if (!(sigma > 0.0))
    throw DegenerateProfileError("gaussian fit: moment seed gives sigma <= 0");

  GaussianFit1D seed;
  seed.offset = offset;
  seed.center = center;
  seed.sigma = sigma;
  seed.amplitude = *std::max_element(profile.begin(), profile.end()) - offset;
  return seed;
}

}  // namespace

GaussianFit1D fit_gaussian_1d(const std::vector<double>& profile,
                              const std::optional<GaussianFit1D>& initial_guess,
                              const std::vector<double>& point_errors) {
  if (profile.size() < 5)
    throw ValidationError("gaussian fit: profile must have at least 5 samples");
  const bool weighted = !point_errors.empty();
  if (weighted && point_errors.size() != profile.size())
    throw ValidationError("gaussian fit: point_errors size mismatch");

  GaussianFit1D seed = initial_guess ? *initial_guess : moment_seed(profile);

  const auto residual = [&](const std::vector<double>& q, std::vector<double>& r) {
    const double a = q[0], x0 = q[1], sg = q[2], b = q[3];
    for (std::size_t j = 0; j < profile.size(); ++j) {
      const double d = (static_cast<double>(j) - x0) / sg;
      const double model = a * std::exp(-0.5 * d * d) + b;
      r[j] = profile[j] - model;
      if (weighted) r[j] /= point_errors[j];
    }
  };

  LevMarOptions opt;
  // Parameter errors come from the inverse normal equations scaled by the
  // residual variance; with true per-point errors the scale factor is ~1 and
  // the errors stay honest when the supplied errors are off by a common factor.
  opt.scale_covariance_by_reduced_chi2 = true;
  LevMarResult res = fit_least_squares(
      residual, profile.size(), {seed.amplitude, seed.center, seed.sigma, seed.offset}, opt);

  GaussianFit1D fit;
  fit.amplitude = res.params[0];
  fit.center = res.params[1];
  fit.sigma = std::fabs(res.params[2]);
  fit.offset = res.params[3];
  fit.amplitude_err = res.std_errors[0];
  fit.center_err = res.std_errors[1];
  fit.sigma_err = res.std_errors[2];
  fit.offset_err = res.std_errors[3];
  fit.reduced_chi2 = res.reduced_chi2;
  fit.iterations = res.iterations;
  if (!(fit.sigma > 0.0)) throw NumericalError("gaussian fit: converged to sigma <= 0");
  return fit;
}

namespace {

// Central square fully covered by source pixels after a 45 degree rotation of
// a w x h frame: half-side = sqrt(2)/4 * min(w, h).
void inscribed_crop_45(const ImageFrame& rotated, int src_w, int src_h, ImageFrame& out) {
  const double half = std::sqrt(2.0) / 4.0 * std::min(src_w, src_h);
  const int cx = (rotated.width_px - 1) / 2;
  const int cy = (rotated.height_px - 1) / 2;
  const int r = std::max(2, static_cast<int>(std::floor(half)) - 1);
  const int x0 = std::max(0, cx - r);
  const int x1 = std::min(rotated.width_px - 1, cx + r);
  const int y0 = std::max(0, cy - r);
  const int y1 = std::min(rotated.height_px - 1, cy + r);
  out = ImageFrame::zeros(x1 - x0 + 1, y1 - y0 + 1, rotated.pixel_pitch);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) out.at(y - y0, x - x0) = rotated.at(y, x);
}

}  // namespace

WidthMeasurement measure_width(const ImageFrame& frame) {
  frame.validate();
  ImageFrame rotated = rotate_45_nearest(frame);
  ImageFrame cropped;
  inscribed_crop_45(rotated, frame.width_px, frame.height_px, cropped);
  const std::vector<double> profile = project_columns(cropped);
  const GaussianFit1D fit = fit_gaussian_1d(profile);

  // Remove the quadrature bias of pixel binning (1/12 px^2, Sheppard) and of
  // the nearest-neighbor resampling jitter (another 1/12 px^2).
  const double bias_px2 = 1.0 / 6.0;
  const double fitted2 = fit.sigma * fit.sigma;
  if (fitted2 <= bias_px2)
    throw NumericalError("measure_width: spot unresolved at the pixel scale");
  const double corrected = std::sqrt(fitted2 - bias_px2);

  WidthMeasurement m;
  m.fit = fit;
  m.sigma = corrected * frame.pixel_pitch;
  m.sigma_err = (fit.sigma / corrected) * fit.sigma_err * frame.pixel_pitch;
  return m;
}

ImageFrame synthesize_ion_image(const ThermalState& state, const ImagingConfig& cfg,
                                std::uint64_t photons, std::uint64_t rng_seed) {
  cfg.validate();
  const double sigma_cam = composite_width(state.sigma_ion, cfg);
  const double sigma_px = sigma_cam / cfg.pixel_pitch;

  ImageFrame frame = ImageFrame::zeros(cfg.frame_width, cfg.frame_height, cfg.pixel_pitch);
  if (6.0 * sigma_px > 0.5 * std::min(cfg.frame_width, cfg.frame_height))
    log::warn("synthesize_ion_image: spot of " + std::to_string(sigma_px) +
              " px RMS is large for the frame, tails will clip");

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  const double cx = 0.5 * (cfg.frame_width - 1);
  const double cy = 0.5 * (cfg.frame_height - 1);

  std::vector<std::uint32_t> photon_counts(frame.counts.size(), 0);
  for (std::uint64_t n = 0; n < photons; ++n) {
    const double x = cx + sigma_px * unit_normal(rng);
    const double y = cy + sigma_px * unit_normal(rng);
    const long xi = std::lround(x);
    const long yi = std::lround(y);
    if (xi < 0 || xi >= cfg.frame_width || yi < 0 || yi >= cfg.frame_height) continue;
    ++photon_counts[static_cast<std::size_t>(yi) * cfg.frame_width + xi];
  }

  for (std::size_t i = 0; i < frame.counts.size(); ++i) {
    double v = cfg.gain * photon_counts[i];
    // EM register excess noise: double the Poisson variance when multiplying.
    if (cfg.gain > 1.0 && photon_counts[i] > 0)
      v += cfg.gain * std::sqrt(static_cast<double>(photon_counts[i])) * unit_normal(rng);
    if (cfg.read_noise > 0.0) v += cfg.read_noise * unit_normal(rng);
    v += cfg.background;
    // Camera ADU: integer, clamped to the 16-bit range.
    v = std::round(v);
    frame.counts[i] = std::clamp(v, 0.0, 65535.0);
  }
  return frame;
}

}  // namespace thermoscope
