#pragma once

#include <functional>
#include <vector>

namespace thermoscope {

// Damped (Levenberg-Marquardt) least squares on a residual vector.
//
// The callback fills r with the weighted residuals (data - model) / sigma for
// the given parameter vector.  The Jacobian is formed by central differences.
// Convergence: max relative parameter change < parameter_tolerance, else
// FitConvergenceError after max_iterations.

struct LevMarOptions {
  int max_iterations = 200;
  double parameter_tolerance = 1e-8;
  double initial_lambda = 1e-3;
  // Scale the covariance (J^T J)^-1 by chi2/dof.  On for unweighted fits
  // where the residual variance estimates the noise, off when the residuals
  // are already divided by true per-point errors.
  bool scale_covariance_by_reduced_chi2 = true;
};

struct LevMarResult {
  std::vector<double> params;
  std::vector<double> std_errors;
  std::vector<std::vector<double>> covariance;
  double chi2 = 0.0;          // sum of squared (weighted) residuals
  double reduced_chi2 = 0.0;  // chi2 / (n - p)
  int iterations = 0;
};

using ResidualFn = std::function<void(const std::vector<double>& params,
                                      std::vector<double>& residuals)>;

LevMarResult fit_least_squares(const ResidualFn& fn, std::size_t residual_count,
                               const std::vector<double>& initial,
                               const LevMarOptions& options = {});

// Solves A x = b for a small dense symmetric system (Gauss elimination with
// partial pivoting).  Throws NumericalError on a singular matrix.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b);

// Inverse of a small dense matrix, same pivoting and error behavior.
std::vector<std::vector<double>> invert_matrix(std::vector<std::vector<double>> a);

}  // namespace thermoscope
