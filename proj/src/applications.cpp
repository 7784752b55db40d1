#include "ustatboot/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ustatboot/errors.hpp"
#include "ustatboot/numeric.hpp"

namespace ustatboot {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
}

double max_asymmetry(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

// All projection variances vanishing means the statistic has no scale to
// bootstrap against.
bool is_degenerate(const HajekTable& hajek) {
  const auto diag = multiplier_cov_diagonal(hajek);
  double largest = 0.0;
  for (const double x : diag) largest = std::max(largest, x);
  return largest <= 0.0;
}

double finite_sample_pvalue(const BootstrapDraws& draws, double statistic) {
  std::size_t count = 0;
  for (const double v : draws.values)
    if (v >= statistic) ++count;
  return static_cast<double>(1 + count) / static_cast<double>(draws.values.size() + 1);
}

TestOutcome sup_norm_test(const DataMatrix& data, const KernelSpec& kernel,
                          const Matrix& null_matrix, double alpha, std::size_t B,
                          std::uint64_t seed, const RunOptions& options,
                          const char* what) {
  require_square(null_matrix, what);
  if (null_matrix.rows() != data.p())
    throw std::invalid_argument(std::string(what) +
                                ": null matrix dimension does not match data");
  if (max_asymmetry(null_matrix) > 1e-8)
    throw std::invalid_argument(std::string(what) + ": null matrix must be symmetric");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument(std::string(what) + ": alpha must lie in (0,1)");

  ComputeOptions copts;
  copts.threads = options.threads;
  copts.dense_dim_limit = options.dense_dim_limit;
  const HajekTable hajek = compute_hajek(data, kernel, copts);

  const TriIndex& idx = kernel.index_map();
  double statistic = 0.0;
  for (std::size_t m = 0; m < idx.p(); ++m)
    for (std::size_t k = m + 1; k < idx.p(); ++k)
      statistic = std::max(
          statistic, std::abs(hajek.u[idx.flat(m, k)] - null_matrix(m, k)));

  // With an all-zero projection the bootstrap law collapses to a point mass
  // at 0: any positive statistic still rejects outright, but a zero
  // statistic leaves nothing to decide with.
  if (is_degenerate(hajek) && statistic <= 0.0)
    throw degeneracy_error(
        "sample is degenerate: every projection variance estimate is zero");

  const auto draws = run_multiplier_bootstrap(
      hajek, kernel, StatFunctional::off_diag_abs_max(StatScale::Rescaled), B, seed,
      options);
  const double critical = quantile(draws, 1.0 - alpha).value;

  TestOutcome outcome;
  outcome.statistic = statistic;
  outcome.critical = critical;
  outcome.reject = statistic >= critical;
  outcome.pvalue = finite_sample_pvalue(draws, statistic);
  outcome.alpha = alpha;
  outcome.B = B;
  outcome.seed = seed;
  return outcome;
}

}  // namespace

Matrix sample_covariance(const DataMatrix& data, const ComputeOptions& options) {
  const auto summary = compute_ustat(data, KernelSpec::covariance(data.p()), options);
  return unflatten_symmetric(summary.u, data.p());
}

Matrix threshold_matrix(const Matrix& s, double tau, bool keep_diagonal) {
  require_square(s, "threshold_matrix");
  if (tau < 0.0) throw std::invalid_argument("threshold_matrix: tau must be >= 0");
  Matrix out(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) {
      const double v = s(i, j);
      if ((keep_diagonal && i == j) || std::abs(v) > tau) out(i, j) = v;
    }
  return out;
}

ThresholdResult select_threshold(const DataMatrix& data, double alpha, double beta,
                                 std::size_t B, std::uint64_t seed,
                                 const ThresholdOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("select_threshold: alpha must lie in (0,1)");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("select_threshold: beta must lie in (0,1]");

  const KernelSpec kernel = KernelSpec::covariance(data.p());
  ComputeOptions copts;
  copts.threads = options.run.threads;
  copts.dense_dim_limit = options.run.dense_dim_limit;
  const HajekTable hajek = compute_hajek(data, kernel, copts);
  if (is_degenerate(hajek))
    throw degeneracy_error(
        "sample is degenerate: every projection variance estimate is zero");

  const auto draws = run_multiplier_bootstrap(
      hajek, kernel, StatFunctional::abs_max(StatScale::Rescaled), B, seed, options.run);
  const double tau_star = quantile(draws, 1.0 - alpha).value / beta;

  ThresholdResult result;
  result.tau_star = tau_star;
  result.alpha = alpha;
  result.beta = beta;
  result.thresholded = threshold_matrix(unflatten_symmetric(hajek.u, data.p()),
                                        tau_star, options.keep_diagonal);
  result.B = B;
  result.seed = seed;
  return result;
}

namespace {

double power_iteration_spectral(const Matrix& a) {
  const std::size_t p = a.rows();
  if (p == 0) return 0.0;

  std::vector<double> v(p, 1.0 / std::sqrt(static_cast<double>(p)));
  std::vector<double> w(p);
  double lambda = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  int perturbations = 0;
  constexpr int kMaxIter = 10000;
  constexpr double kTol = 1e-10;

  double scale = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) scale = std::max(scale, std::abs(a(i, j)));
  if (scale == 0.0) return 0.0;

  for (int iter = 1; iter <= kMaxIter; ++iter) {
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += a(i, j) * v[j];
      w[i] = s;
    }
    lambda = 0.0;
    for (std::size_t i = 0; i < p; ++i) lambda += v[i] * w[i];

    double residual = 0.0;
    double wnorm = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double r = w[i] - lambda * v[i];
      residual += r * r;
      wnorm += w[i] * w[i];
    }
    residual = std::sqrt(residual);
    wnorm = std::sqrt(wnorm);
    if (residual <= kTol * std::max(1.0, std::abs(lambda))) return std::abs(lambda);

    if (wnorm <= 1e-300 * scale) {
      // iterate collapsed into the null space; restart off the ones vector
      for (std::size_t i = 0; i < p; ++i)
        v[i] = 1.0 + static_cast<double>(i + 1) / static_cast<double>(p);
      double norm = 0.0;
      for (const double x : v) norm += x * x;
      norm = std::sqrt(norm);
      for (auto& x : v) x /= norm;
      continue;
    }
    for (std::size_t i = 0; i < p; ++i) v[i] = w[i] / wnorm;

    // every 500 steps, check for stagnation (residual not shrinking) and
    // nudge the iterate off a possible +/- eigenvalue cycle
    if (iter % 500 == 0) {
      if (residual > 0.5 * best_residual && perturbations < 3) {
        ++perturbations;
        for (std::size_t i = 0; i < p; ++i)
          v[i] += 1e-4 * static_cast<double>(i + 1) / static_cast<double>(p);
        double norm = 0.0;
        for (const double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (auto& x : v) x /= norm;
        best_residual = std::numeric_limits<double>::infinity();
        continue;
      }
      best_residual = std::min(best_residual, residual);
    }
  }

  std::ostringstream msg;
  msg << "power iteration did not converge within " << kMaxIter
      << " iterations (last eigenvalue estimate " << lambda << ", dimension " << p
      << ")";
  throw numerical_error(msg.str());
}

}  // namespace

MatrixNorms matrix_norms(const Matrix& a) {
  require_square(a, "matrix_norms");
  if (max_asymmetry(a) > 1e-8)
    throw std::invalid_argument("matrix_norms: input is not symmetric");

  const std::size_t p = a.rows();
  Matrix sym(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));

  MatrixNorms norms;
  double frob2 = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double colsum = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double v = std::abs(sym(j, i));
      colsum += v;
      frob2 += v * v;
      norms.sup = std::max(norms.sup, v);
      if (i != j) norms.off_sup = std::max(norms.off_sup, v);
    }
    norms.l1 = std::max(norms.l1, colsum);
  }
  norms.frobenius = std::sqrt(frob2);
  norms.spectral = power_iteration_spectral(sym);
  return norms;
}

TestOutcome simultaneous_cov_test(const DataMatrix& data, const Matrix& sigma0,
                                  double alpha, std::size_t B, std::uint64_t seed,
                                  const RunOptions& options) {
  return sup_norm_test(data, KernelSpec::covariance(data.p()), sigma0, alpha, B, seed,
                       options, "cov test");
}

TestOutcome kendall_test(const DataMatrix& data, const Matrix& tau0, double alpha,
                         std::size_t B, std::uint64_t seed, const RunOptions& options) {
  for (std::size_t i = 0; i < tau0.rows(); ++i)
    for (std::size_t j = 0; j < tau0.cols(); ++j)
      if (!(tau0(i, j) >= 0.0 && tau0(i, j) <= 1.0))
        throw std::invalid_argument("kendall test: null entries must lie in [0,1]");
  return sup_norm_test(data, KernelSpec::kendall_tau(data.p()), tau0, alpha, B, seed,
                       options, "kendall test");
}

}  // namespace ustatboot
