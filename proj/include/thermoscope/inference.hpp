#pragma once

#include <array>
#include <string>
#include <vector>

#include "thermoscope/imaging.hpp"
#include "thermoscope/params.hpp"

namespace thermoscope {

enum class ScanKind { rabi_scan, detuning_scan };

std::string scan_kind_name(ScanKind kind);
ScanKind scan_kind_from_name(const std::string& name);

struct ScanPoint {
  double control = 0.0;    // scanned rabi or detuning [rad/s]
  double sigma = 0.0;      // measured image width [m]
  double sigma_err = 0.0;  // [m], > 0
};

struct ScanDataset {
  ScanKind kind = ScanKind::rabi_scan;
  double fixed_value = 0.0;  // the held parameter, detuning or rabi [rad/s]
  std::vector<ScanPoint> points;
  std::string axis = "x";

  void validate() const;  // >= 4 points, distinct controls, positive errors
};

struct HeatingFitResult {
  double zeta = 0.0;       // [quanta/s]
  double zeta_err = 0.0;
  double sigma_psf = 0.0;  // [m]
  double sigma_psf_err = 0.0;
  std::array<std::array<double, 2>, 2> covariance{};  // (zeta, sigma_psf) order
  double reduced_chi2 = 0.0;
  std::vector<double> residuals;  // (sigma_j - model_j) / sigma_err_j
  // The quanta/s <-> W conversion uses the analyzed axis's trap frequency.
  std::string zeta_mode_note = "zeta converted with the analyzed-axis trap frequency";
};

// Predicted image width at one scan point: equilibrium temperature for the
// implied (rabi, detuning), Eq-of-motion spread, PSF in quadrature.
double model_width(double control, ScanKind kind, double fixed_value, double zeta,
                   double sigma_psf, const ExperimentParams& p, double magnification);

// Weighted least squares over (zeta, sigma_psf) with both bounds at 0
// (optimized in square-root coordinates), multi-start over a 4x4 log-spaced
// seed grid.  Covariance from the weighted normal equations, evaluated in the
// original coordinates.  Throws UnderDeterminedError when the model Jacobian
// is rank-deficient at tolerance 1e-12.
HeatingFitResult fit_heating_rate(const ScanDataset& dataset, const ExperimentParams& p,
                                  double magnification);

struct TemperatureEstimate {
  double temperature = 0.0, temperature_err = 0.0;  // [K]
  double nbar = 0.0, nbar_err = 0.0;
};

// Width -> (T, nbar) with first-order propagation of (sigma_err, psf and
// magnification uncertainties from cfg) added in quadrature.
TemperatureEstimate temperature_from_width(double sigma, double sigma_err,
                                           const ImagingConfig& cfg,
                                           const ExperimentParams& p);

// Temperature at which the relative error delta T / T reaches `relative_error`
// assuming a noiseless width measurement (only the PSF and magnification
// uncertainties contribute).  Bisection on T.
double minimum_measurable_temperature(const ImagingConfig& cfg, const ExperimentParams& p,
                                      double relative_error = 0.5);

// Dataset CSV: "control,sigma_um,sigma_err_um" with controls in Gamma units
// (rabi scans) or MHz (detuning scans); a JSON sidecar (same path, .json)
// names the scan kind, fixed value, and units.
void save_scan_dataset(const ScanDataset& dataset, const ExperimentParams& p,
                       const std::string& csv_path);
ScanDataset load_scan_dataset(const ExperimentParams& p, const std::string& csv_path);

}  // namespace thermoscope
