#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "ustatboot/kernels.hpp"
#include "ustatboot/matrix.hpp"
#include "ustatboot/rng.hpp"

namespace ustatboot {

/// Synthetic data families: a contaminated elliptical normal (sub-exponential
/// tails), an elliptical t (polynomial tails), and a block design whose
/// covariance is block-diagonal with rank-one blocks.
enum class ModelKind { ContaminatedNormal, EllipticalT, BlockDiag };

/// Scale-matrix families: strong equicorrelation 0.9*J + 0.1*I, AR(1) with
/// rho = 0.7, AR(1) with rho = 0.3, or a caller-provided matrix.
enum class DepKind { Strong, Ar07, Ar03, Custom };

ModelKind parse_model(std::string_view name);  // "m1" | "m2" | "block"
DepKind parse_dep(std::string_view name);      // "d1" | "d2" | "d3"
const char* model_name(ModelKind model);
const char* dep_name(DepKind dep);

struct SimConfig {
  ModelKind model = ModelKind::ContaminatedNormal;
  double epsilon = 0.2;  // contamination fraction (ContaminatedNormal)
  double nu = 1.5;       // contamination scale, or t degrees of freedom
  std::size_t blocks = 0;      // L (BlockDiag)
  std::size_t block_size = 0;  // m (BlockDiag)
  DepKind dep = DepKind::Ar07;
  Matrix custom_v;
  std::size_t n = 500;
  std::size_t p = 40;
  std::size_t reps = 5000;
  std::uint64_t seed = 0;
};

/// Validates the parameter ranges (epsilon in (0,1), t needs nu > 4 for a
/// finite kurtosis, block design needs p = blocks * block_size).
void validate_config(const SimConfig& config);

Matrix build_dependence(DepKind dep, std::size_t p, const Matrix* custom = nullptr);

/// Lower-triangular factor of v; on factorization failure a relative jitter
/// of 1e-10 is added to the diagonal once before giving up.
Matrix gaussian_factor(const Matrix& v);

/// count iid rows of N(0, v) drawn from the stream.
Matrix sample_gaussian(const Matrix& factor, std::size_t count, CounterRng& rng);

/// count iid rows from the configured model, consuming stream (seed, stream).
DataMatrix sample_model(const SimConfig& config, std::size_t count,
                        std::uint64_t stream = 0);

/// Per-coordinate variance multiplier of the model relative to v
/// ((1-eps) + eps*nu^2 for the contaminated normal, nu/(nu-2) for the t,
/// 1 for the block design).
double model_variance_scale(const SimConfig& config);

/// Kurtosis parameter of the elliptical family; the block design is Gaussian
/// (kurtosis 0).
double model_kurtosis(const SimConfig& config);

/// Covariance of the projection of the covariance kernel under an elliptical
/// law, determined by (kurtosis, Sigma): entries
/// ((kappa+1)(sigma_jm sigma_kl + sigma_jl sigma_km) + kappa sigma_jk sigma_ml)/4.
struct GammaModel {
  double kurtosis = 0.0;
  Matrix sigma;  // the actual covariance (variance scale already applied)

  double entry(std::size_t j, std::size_t k, std::size_t m, std::size_t l) const;
  /// Full d x d matrix over flattened pairs; refuses past dense_limit.
  Matrix materialize(std::size_t dense_limit = 4096) const;
};

GammaModel make_gamma_model(const SimConfig& config);

/// Exact sampler for Y ~ N(0, Gamma) given a materialized Gamma.
struct GaussianReference {
  Matrix factor;  // d x d lower-triangular
};

GaussianReference make_gaussian_reference(const Matrix& gamma,
                                          std::size_t dense_limit = 4096);

Matrix sample_reference_rows(const GaussianReference& ref, std::size_t count,
                             std::uint64_t seed, std::uint64_t stream);

struct MaxReductions {
  std::vector<double> max;      // max_m Y_m per draw
  std::vector<double> abs_max;  // max_m |Y_m| per draw
};

MaxReductions sample_reference_reductions(const GaussianReference& ref,
                                          std::size_t count, std::uint64_t seed,
                                          std::uint64_t stream, unsigned threads = 0);

/// Two-sample Kolmogorov-Smirnov statistic sup_t |F_a(t) - F_b(t)|.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct ExperimentOptions {
  unsigned threads = 0;
  bool sanity_mode = false;  // draw the "data" sample from the reference law too
  std::size_t grid_points = 512;
  std::size_t dense_limit = 4096;
  bool include_size_experiment = false;
  double size_alpha = 0.05;
  std::size_t size_B = 200;
  std::size_t size_reps = 100;
};

/// One cell of the Gaussian-approximation study: R replications of the
/// centered covariance-kernel maximum against R reference draws, with the
/// KS summary and cdf curves on a fixed grid.
struct CellSummary {
  SimConfig config;
  double ks_max = 0.0;
  double ks_abs_max = 0.0;
  std::vector<double> t_max, t_abs_max;  // per replication
  std::vector<double> y_max, y_abs_max;  // per reference draw
  std::vector<double> grid_max, cdf_t_max, cdf_y_max;
  std::vector<double> grid_abs_max, cdf_t_abs_max, cdf_y_abs_max;
  std::optional<double> cov_test_rejection_rate;
};

CellSummary run_gaussian_approx_cell(const SimConfig& config,
                                     const ExperimentOptions& options = {});

/// Write the per-cell CSV artifacts (draws and cdf curves) into dir.
void write_cell_csv(const CellSummary& cell, const std::filesystem::path& dir);

/// Rejection rate of the covariance or concordance test over R Gaussian
/// samples N(0, v) against the given null matrix.
enum class SizeTestKind { Covariance, KendallTau };
double test_size_experiment(SizeTestKind kind, const Matrix& v, std::size_t n,
                            const Matrix& null_matrix, double alpha, std::size_t B,
                            std::size_t R, std::uint64_t seed, unsigned threads = 0);

}  // namespace ustatboot
