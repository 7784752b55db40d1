#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ustatboot/kernels.hpp"
#include "ustatboot/matrix.hpp"

namespace ustatboot {

struct ComputeOptions {
  unsigned threads = 0;              // 0 = hardware concurrency
  std::size_t dense_dim_limit = 4096;  // refuse d x d materializations past this
};

/// U- and V-statistic of a kernel over the sample. v always satisfies
/// n*v = (n-1)*u + diag_mean with diag_mean the average of h(X_i, X_i).
struct UStatSummary {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> diag_mean;
  std::size_t n = 0;
  KernelSpec kernel;
};

/// Per-observation projection estimates: row i holds
/// ghat_i = (n-1)^{-1} sum_{j != i} h(X_i, X_j) - U_n. Columns sum to zero up
/// to accumulation error.
struct HajekTable {
  Matrix ghat;  // n x d
  std::vector<double> u;
  std::size_t n = 0;
  std::size_t d = 0;
};

enum class CovKind { EmpiricalBootstrap, Jackknife, Multiplier };

struct CovEstimate {
  Matrix matrix;  // d x d symmetric
  CovKind kind;
};

/// U_n over all ordered pairs i != j, plus the V-statistic (pairs including
/// i = j). Fast paths: mean kernel O(np) (U_n is the sample mean), covariance
/// kernel O(np^2) (U_n is the unbiased sample covariance); generic kernels use
/// the O(n^2 d) pairwise accumulation.
UStatSummary compute_ustat(const DataMatrix& data, const KernelSpec& kernel,
                           const ComputeOptions& options = {});

/// Projection table; requires n >= 3 (downstream scalings divide by n-2).
HajekTable compute_hajek(const DataMatrix& data, const KernelSpec& kernel,
                         const ComputeOptions& options = {});

/// Multiplier covariance n^{-1} sum_i ghat_i ghat_i^T (positive semidefinite
/// by construction). Throws resource_limit_error past the dense dimension
/// limit; use multiplier_cov_diagonal for large d.
CovEstimate multiplier_cov(const HajekTable& hajek, const ComputeOptions& options = {});
std::vector<double> multiplier_cov_diagonal(const HajekTable& hajek);

/// Jackknife covariance estimate; equals the multiplier covariance scaled by
/// n(n-1)/(n-2)^2.
CovEstimate jackknife_cov(const HajekTable& hajek, const ComputeOptions& options = {});

/// Conditional covariance of the bootstrap projection:
/// n^{-1} sum_i G_i G_i^T - V_n V_n^T with G_i = n^{-1} sum_j h(X_i, X_j).
CovEstimate eb_cov(const DataMatrix& data, const KernelSpec& kernel,
                   const ComputeOptions& options = {});
std::vector<double> eb_cov_diagonal(const DataMatrix& data, const KernelSpec& kernel,
                                    const ComputeOptions& options = {});

/// Half-sample estimator: mean of h(X_i, X_{i+m}) for i = 1..m, m = floor(n/2)
/// (odd n drops the last row). An iid-summand estimate of E h, handy as an
/// independent reference in tests.
std::vector<double> split_sum(const DataMatrix& data, const KernelSpec& kernel);

/// Identifiers of every specialized evaluation path, so test suites can
/// assert that each one is exercised against a literal-loop reference.
const std::vector<std::string>& fast_path_names();

}  // namespace ustatboot
