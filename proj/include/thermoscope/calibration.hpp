#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thermoscope/imaging.hpp"

namespace thermoscope {

// One piezo displacement and the fitted centroid shift it produced on the
// camera, for one lateral axis.
struct DisplacementPair {
  char axis = 'x';             // 'x' or 'y'
  double object_shift = 0.0;   // [m], nonzero
  double object_err = 0.0;     // [m]
  double image_shift = 0.0;    // [m] at the camera plane
  double image_err = 0.0;      // [m]
};

struct MagnificationResult {
  double mx = 0.0, mx_err = 0.0;
  double my = 0.0, my_err = 0.0;
  double m = 0.0, m_err = 0.0;  // sqrt((Mx^2 + My^2) / 2)
  bool inconsistent = false;    // some ratio sits > 5 sigma from the axis mean
};

// Per-axis magnification as the inverse-variance-weighted mean of
// image/object ratios; combined M by the quadrature mean; first-order error
// propagation throughout.  Requires at least one pair per axis and nonzero
// object shifts.
MagnificationResult magnification_from_pairs(const std::vector<DisplacementPair>& pairs);

// Centroid shift between two frames of the same spot, from 1D Gaussian fits
// of the row and column projections.  Returns camera-plane meters.
struct CentroidShift {
  double dx = 0.0, dx_err = 0.0;
  double dy = 0.0, dy_err = 0.0;
};
CentroidShift centroid_shift_from_frames(const ImageFrame& before, const ImageFrame& after);

// Normalized second-order autocorrelation histogram.
struct G2Histogram {
  std::vector<double> bin_centers;  // delay [s]
  std::vector<double> values;       // normalized coincidences
  double bin_width = 0.0;           // [s]

  void validate() const;
};

// Model: g2(t) = bg - A (cos^2(omega' (t - t0) / 2) - 1/2) exp(-|t - t0| / tau)
struct G2FitResult {
  double bg = 0.0, bg_err = 0.0;
  double amplitude = 0.0, amplitude_err = 0.0;
  double omega_prime = 0.0, omega_prime_err = 0.0;  // [rad/s]
  double t0 = 0.0, t0_err = 0.0;                    // [s]
  double tau = 0.0, tau_err = 0.0;                  // [s]
  double reduced_chi2 = 0.0;
  int iterations = 0;
};

double g2_model(double t, double bg, double amplitude, double omega_prime, double t0,
                double tau);

// Five-parameter damped least squares.  Self-seeding: bg from the tail mean,
// t0 from the minimum bin, omega' from the dominant discrete-spectrum peak of
// (values - bg), tau from the envelope decay.  Throws SeedFailureError when
// no spectral peak exceeds 3x the noise floor.  Optional per-bin errors
// weight the fit.
G2FitResult fit_g2(const G2Histogram& hist,
                   const std::optional<G2FitResult>& initial_guess = std::nullopt,
                   const std::vector<double>& bin_errors = {});

// Omega = sqrt(omega'^2 - detuning^2); throws ImaginaryResultError when
// |omega'| < |detuning|.
double on_resonance_rabi(double omega_prime, double detuning);
// Same, with first-order error propagation from the fitted omega'.
double on_resonance_rabi_err(double omega_prime, double omega_prime_err, double detuning);

// Power scaling omega = omega_cal sqrt(P / P_cal).
double rabi_from_power(double power, double power_cal, double omega_cal);

// CSV loaders: g2 histograms as (tau_ns, g2_value [, g2_err]) rows,
// displacement pairs as (axis, object_shift_nm, object_err_nm,
// image_shift_um, image_err_um) rows.  '#' lines are comments.
G2Histogram load_g2_csv(const std::string& path);
std::vector<DisplacementPair> load_displacement_pairs_csv(const std::string& path);

}  // namespace thermoscope
