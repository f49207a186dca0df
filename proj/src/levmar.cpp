#include "thermoscope/levmar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermoscope/errors.hpp"

namespace thermoscope {

std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-300)
      throw NumericalError("linear solve: singular normal matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

std::vector<std::vector<double>> invert_matrix(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-300)
      throw NumericalError("matrix inverse: singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

namespace {

double chi2_of(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

// Central-difference Jacobian, rows = residuals, cols = parameters.
void numeric_jacobian(const ResidualFn& fn, const std::vector<double>& params,
                      std::size_t m, std::vector<std::vector<double>>& jac) {
  const std::size_t p = params.size();
  std::vector<double> lo(m), hi(m);
  std::vector<double> work = params;
  for (std::size_t j = 0; j < p; ++j) {
    const double h = 1e-7 * std::max(std::fabs(params[j]), 1e-12);
    work[j] = params[j] + h;
    fn(work, hi);
    work[j] = params[j] - h;
    fn(work, lo);
    work[j] = params[j];
    for (std::size_t i = 0; i < m; ++i) jac[i][j] = (hi[i] - lo[i]) / (2.0 * h);
  }
}

}  // namespace

LevMarResult fit_least_squares(const ResidualFn& fn, std::size_t residual_count,
                               const std::vector<double>& initial,
                               const LevMarOptions& options) {
  const std::size_t m = residual_count;
  const std::size_t p = initial.size();
  if (m <= p) throw ValidationError("least squares: need more residuals than parameters");

  std::vector<double> params = initial;
  std::vector<double> residuals(m), trial_residuals(m);
  fn(params, residuals);
  double chi2 = chi2_of(residuals);
  if (!std::isfinite(chi2))
    throw NumericalError("least squares: non-finite residuals at the initial point");

  std::vector<std::vector<double>> jac(m, std::vector<double>(p, 0.0));
  double lambda = options.initial_lambda;
  bool converged = false;
  int iter = 0;

  for (; iter < options.max_iterations && !converged; ++iter) {
    numeric_jacobian(fn, params, m, jac);

    // Normal equations J^T J and gradient J^T r.
    std::vector<std::vector<double>> jtj(p, std::vector<double>(p, 0.0));
    std::vector<double> jtr(p, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t a = 0; a < p; ++a) {
        jtr[a] += jac[i][a] * residuals[i];
        for (std::size_t b = a; b < p; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
      }
    }
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      auto damped = jtj;
      for (std::size_t a = 0; a < p; ++a)
        damped[a][a] += lambda * std::max(jtj[a][a], 1e-300);

      std::vector<double> step;
      try {
        std::vector<double> rhs(p);
        for (std::size_t a = 0; a < p; ++a) rhs[a] = -jtr[a];
        step = solve_linear(damped, rhs);
      } catch (const NumericalError&) {
        lambda *= 10.0;
        continue;
      }

      std::vector<double> trial(p);
      for (std::size_t a = 0; a < p; ++a) trial[a] = params[a] + step[a];
      fn(trial, trial_residuals);
      const double trial_chi2 = chi2_of(trial_residuals);
      if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
        double max_rel = 0.0;
        for (std::size_t a = 0; a < p; ++a) {
          const double scale = std::max(std::fabs(params[a]), 1e-12);
          max_rel = std::max(max_rel, std::fabs(step[a]) / scale);
        }
        params = trial;
        residuals = trial_residuals;
        chi2 = trial_chi2;
        lambda = std::max(lambda / 3.0, 1e-14);
        accepted = true;
        if (max_rel < options.parameter_tolerance) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // Damping saturated: the current point is a (local) minimum.
      converged = true;
    }
  }

  if (!converged)
    throw FitConvergenceError("least squares: no convergence within iteration limit");

  LevMarResult result;
  result.params = params;
  result.chi2 = chi2;
  result.iterations = iter;
  result.reduced_chi2 = chi2 / static_cast<double>(m - p);

  numeric_jacobian(fn, params, m, jac);
  std::vector<std::vector<double>> jtj(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a; b < p; ++b) jtj[a][b] += jac[i][a] * jac[i][b];
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

  result.covariance = invert_matrix(jtj);
  if (options.scale_covariance_by_reduced_chi2) {
    for (auto& row : result.covariance)
      for (double& v : row) v *= result.reduced_chi2;
  }
  result.std_errors.resize(p);
  for (std::size_t a = 0; a < p; ++a)
    result.std_errors[a] = std::sqrt(std::max(result.covariance[a][a], 0.0));
  return result;
}

}  // namespace thermoscope
