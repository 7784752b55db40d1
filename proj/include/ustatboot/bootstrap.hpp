#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ustatboot/kernels.hpp"
#include "ustatboot/ustat.hpp"

namespace ustatboot {

enum class BootstrapMethod { Empirical, Reweighted, ReweightedFlat, Multiplier };

const char* method_name(BootstrapMethod method);
BootstrapMethod parse_method(std::string_view name);

enum class StatKind { Max, AbsMax, OffDiagAbsMax, Rectangle };
enum class StatScale { Raw, Rescaled };  // Rescaled multiplies entries by 2/sqrt(n)

/// Scalar reduction applied to each replicate vector.
struct StatFunctional {
  StatKind kind = StatKind::AbsMax;
  StatScale scale = StatScale::Raw;
  std::vector<double> lo, hi;  // Rectangle bounds, length d

  static StatFunctional max(StatScale scale = StatScale::Raw) {
    return {StatKind::Max, scale, {}, {}};
  }
  static StatFunctional abs_max(StatScale scale = StatScale::Raw) {
    return {StatKind::AbsMax, scale, {}, {}};
  }
  static StatFunctional off_diag_abs_max(StatScale scale = StatScale::Raw) {
    return {StatKind::OffDiagAbsMax, scale, {}, {}};
  }
  static StatFunctional rectangle(std::vector<double> lo, std::vector<double> hi) {
    return {StatKind::Rectangle, StatScale::Raw, std::move(lo), std::move(hi)};
  }
};

/// B replicate values of the chosen scalar functional. Reproducible: the
/// same (data, kernel, method, functional, B, seed) give bit-identical
/// values for any worker count.
struct BootstrapDraws {
  std::vector<double> values;
  BootstrapMethod method = BootstrapMethod::Multiplier;
  StatFunctional functional;
  std::uint64_t seed = 0;
  std::size_t B = 0;
};

struct QuantileEstimate {
  double level = 0.0;
  double value = 0.0;
  std::size_t B = 0;
  BootstrapMethod method = BootstrapMethod::Multiplier;
};

/// One multiplier replicate: n^{-1/2} sum_i ghat_i e_i, linear in e.
std::vector<double> multiplier_draw(const HajekTable& hajek, std::span<const double> e);

/// One resampling replicate sqrt(n) (U_n^* - V_n) / 2 for the rows selected
/// by idx (duplicates allowed; the kernel is evaluated at equal arguments
/// when resampled rows coincide).
std::vector<double> empirical_draw(const UStatSummary& summary, const DataMatrix& data,
                                   const KernelSpec& kernel,
                                   std::span<const std::size_t> idx);

/// One reweighted replicate sqrt(n) (U_n^w - U_n) / 2 for pair weights
/// w_i w_j; with flat = true the centering correction
/// - sqrt(n) (wbar - 1) U_n is applied on top, term for term.
std::vector<double> reweighted_draw(const UStatSummary& summary, const DataMatrix& data,
                                    const KernelSpec& kernel, std::span<const double> w,
                                    bool flat);

struct RunOptions {
  unsigned threads = 0;
  // Projected replicate cost B*n^2*d beyond which resampling methods on
  // kernels without a fast path print a hint to prefer the multiplier method.
  double cost_budget = 1e10;
  bool warn_on_cost = true;
  std::size_t dense_dim_limit = 4096;
};

/// Generate B replicates; replicate b consumes the counter-based stream
/// (seed, b), so results do not depend on worker count or completion order.
BootstrapDraws run_bootstrap(const DataMatrix& data, const KernelSpec& kernel,
                             BootstrapMethod method, const StatFunctional& functional,
                             std::size_t B, std::uint64_t seed,
                             const RunOptions& options = {});

/// As run_bootstrap with BootstrapMethod::Multiplier, reusing an already
/// computed projection table.
BootstrapDraws run_multiplier_bootstrap(const HajekTable& hajek,
                                        const KernelSpec& kernel,
                                        const StatFunctional& functional,
                                        std::size_t B, std::uint64_t seed,
                                        const RunOptions& options = {});

/// Empirical quantile in inf form: the ceil(alpha*B)-th order statistic, so
/// the result is always an attained draw value.
QuantileEstimate quantile(const BootstrapDraws& draws, double alpha);

/// Fraction of Rectangle-functional replicates falling inside the rectangle.
double rectangle_probability(const BootstrapDraws& draws);

/// Reduce one replicate vector (entries scaled by rescale first).
double reduce_functional(const StatFunctional& functional, std::span<const double> v,
                         const KernelSpec& kernel, double rescale);

}  // namespace ustatboot
