#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermoscope/params.hpp"

namespace thermoscope {

// Camera frame: nonnegative counts on a width_px x height_px grid, row-major.
struct ImageFrame {
  std::vector<double> counts;
  int width_px = 0;
  int height_px = 0;
  double pixel_pitch = 4e-6;  // physical pixel size at the camera plane [m]

  double at(int row, int col) const { return counts[static_cast<std::size_t>(row) * width_px + col]; }
  double& at(int row, int col) { return counts[static_cast<std::size_t>(row) * width_px + col]; }
  double total() const;

  static ImageFrame zeros(int width, int height, double pitch);
  void validate() const;
};

struct ImagingConfig {
  double magnification = 1.0;  // M
  double sigma_psf = 0.0;      // RMS point-spread width at the camera plane [m]
  double background = 0.0;     // uniform offset [counts/pixel]
  double gain = 1.0;           // counts/photon (synthesis only)
  double read_noise = 0.0;     // RMS counts (synthesis only)

  // 1-sigma calibration uncertainties, used by the temperature error budget.
  double magnification_err = 0.0;
  double sigma_psf_err = 0.0;

  // Synthesis geometry; the pitch default keeps a ~20 um spot sampled at
  // >= 5 px per sigma.
  double pixel_pitch = 4e-6;
  int frame_width = 256;
  int frame_height = 256;

  void validate() const;
};

ImagingConfig imaging_config_from_json_text(const std::string& text);
ImagingConfig load_imaging_config(const std::string& path);
std::string imaging_config_to_json_text(const ImagingConfig& cfg);

struct GaussianFit1D {
  double amplitude = 0.0;
  double center = 0.0;  // px
  double sigma = 0.0;   // px
  double offset = 0.0;
  double amplitude_err = 0.0;
  double center_err = 0.0;
  double sigma_err = 0.0;
  double offset_err = 0.0;
  double reduced_chi2 = 0.0;
  int iterations = 0;
};

// Width of the recorded spot: PSF and magnified ion spread in quadrature.
double composite_width(double sigma_ion, const ImagingConfig& cfg);

// Inverse of composite_width; throws DeconvolutionError when
// sigma_image <= sigma_psf (source unresolved at this PSF).
double extract_ion_width(double sigma_image, const ImagingConfig& cfg);

// Resamples the frame rotated by `angle` (default 45 deg) about its geometric
// center with nearest-neighbor interpolation.  The output canvas is the
// ceiling of the rotated bounding box (parity-matched to the input so an odd
// center pixel stays a pixel); pixels mapping outside the source are 0.
ImageFrame rotate_nearest(const ImageFrame& frame, double angle_rad);
ImageFrame rotate_45_nearest(const ImageFrame& frame);

// profile[j] = sum over rows of column j.  Total mass preserved.
std::vector<double> project_columns(const ImageFrame& frame);

// Damped least-squares fit of A exp(-(x - x0)^2 / (2 sigma^2)) + b to the
// profile.  Seeds from moments when no guess is given (offset = min,
// center = centroid, sigma = RMS width); throws DegenerateProfileError when
// the moment seed collapses.  Optional per-point errors weight the fit and
// make reduced_chi2 a true goodness-of-fit.
GaussianFit1D fit_gaussian_1d(const std::vector<double>& profile,
                              const std::optional<GaussianFit1D>& initial_guess = std::nullopt,
                              const std::vector<double>& point_errors = {});

struct WidthMeasurement {
  double sigma = 0.0;      // [m] at the camera plane
  double sigma_err = 0.0;  // [m]
  GaussianFit1D fit;       // underlying profile fit, px units
};

// Full pipeline for one frame: rotate 45 deg, crop to the largest centered
// square fully covered by source pixels (keeps a uniform background flat in
// the projection), project columns, fit.  The reported width removes the
// pixel-binning and resampling quadrature bias of 1/6 px^2.
WidthMeasurement measure_width(const ImageFrame& frame);

// Forward model for round-trip tests: photon positions from an isotropic 2D
// Gaussian of RMS composite_width(state.sigma_ion), binned onto the grid,
// EM gain, excess noise (doubled Poisson variance) when gain > 1, Gaussian
// read noise, uniform background.  Counts are quantized to integer ADU and
// clamped to [0, 65535].  Deterministic for a fixed seed.
ImageFrame synthesize_ion_image(const ThermalState& state, const ImagingConfig& cfg,
                                std::uint64_t photons, std::uint64_t rng_seed);

}  // namespace thermoscope
