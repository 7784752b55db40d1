#pragma once

#include <cstdint>

#include "ustatboot/bootstrap.hpp"
#include "ustatboot/kernels.hpp"
#include "ustatboot/matrix.hpp"

namespace ustatboot {

/// Hard-thresholded sample covariance with the bootstrap-selected cut.
struct ThresholdResult {
  double tau_star = 0.0;
  double alpha = 0.0;
  double beta = 1.0;
  Matrix thresholded;  // p x p
  std::size_t B = 0;
  std::uint64_t seed = 0;
};

struct TestOutcome {
  double statistic = 0.0;
  double critical = 0.0;
  bool reject = false;
  double pvalue = 1.0;
  double alpha = 0.0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
};

struct MatrixNorms {
  double sup = 0.0;        // max |a_ij|
  double off_sup = 0.0;    // max |a_ij| over i != j
  double frobenius = 0.0;
  double spectral = 0.0;   // largest |eigenvalue|
  double l1 = 0.0;         // max column absolute sum
};

/// Unbiased sample covariance as a full p x p matrix.
Matrix sample_covariance(const DataMatrix& data, const ComputeOptions& options = {});

/// Entrywise hard thresholding, strict inequality |s| > tau; the diagonal is
/// thresholded too unless keep_diagonal is set.
Matrix threshold_matrix(const Matrix& s, double tau, bool keep_diagonal = false);

struct ThresholdOptions {
  bool keep_diagonal = false;
  RunOptions run;
};

/// Bootstrap threshold selection: tau_star = quantile_{1-alpha} of the
/// rescaled multiplier maximum (all entries, diagonal included) divided by
/// beta, applied to the unbiased sample covariance.
ThresholdResult select_threshold(const DataMatrix& data, double alpha, double beta,
                                 std::size_t B, std::uint64_t seed,
                                 const ThresholdOptions& options = {});

/// Norms of a symmetric matrix; inputs with asymmetry above 1e-8 are
/// rejected, smaller asymmetries are symmetrized first. The spectral norm is
/// computed by power iteration (tolerance 1e-10, at most 10000 iterations,
/// all-ones start, deterministic perturbation on stagnation).
MatrixNorms matrix_norms(const Matrix& a);

/// Level-alpha test of a fully specified covariance matrix against the
/// off-diagonal sup-norm statistic |S_n - Sigma_0|_{inf,off} with the
/// rescaled multiplier bootstrap critical value.
TestOutcome simultaneous_cov_test(const DataMatrix& data, const Matrix& sigma0,
                                  double alpha, std::size_t B, std::uint64_t seed,
                                  const RunOptions& options = {});

/// Same test for the pairwise-concordance matrix (entries of the null matrix
/// must lie in [0,1]).
TestOutcome kendall_test(const DataMatrix& data, const Matrix& tau0, double alpha,
                         std::size_t B, std::uint64_t seed,
                         const RunOptions& options = {});

}  // namespace ustatboot
