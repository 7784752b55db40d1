#include "ustatboot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "ustatboot/errors.hpp"
#include "ustatboot/numeric.hpp"
#include "ustatboot/parallel.hpp"
#include "ustatboot/rng.hpp"

namespace ustatboot {

const char* method_name(BootstrapMethod method) {
  switch (method) {
    case BootstrapMethod::Empirical: return "eb";
    case BootstrapMethod::Reweighted: return "rw";
    case BootstrapMethod::ReweightedFlat: return "rwflat";
    case BootstrapMethod::Multiplier: return "mult";
  }
  return "unknown";
}

BootstrapMethod parse_method(std::string_view name) {
  if (name == "eb") return BootstrapMethod::Empirical;
  if (name == "rw") return BootstrapMethod::Reweighted;
  if (name == "rwflat") return BootstrapMethod::ReweightedFlat;
  if (name == "mult") return BootstrapMethod::Multiplier;
  throw std::invalid_argument("unknown bootstrap method '" + std::string(name) +
                              "' (expected eb, rw, rwflat or mult)");
}

std::vector<double> multiplier_draw(const HajekTable& hajek, std::span<const double> e) {
  if (e.size() != hajek.n)
    throw std::invalid_argument("multiplier_draw: weight vector length must equal n");
  std::vector<double> out(hajek.d, 0.0);
  for (std::size_t i = 0; i < hajek.n; ++i) {
    const double ei = e[i];
    const auto row = hajek.ghat.row(i);
    for (std::size_t m = 0; m < hajek.d; ++m) out[m] += row[m] * ei;
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(hajek.n));
  for (auto& x : out) x *= scale;
  return out;
}

namespace {

// U-statistic of the kernel over an arbitrary row selection (positions must
// be distinct as positions; the underlying rows may repeat).
std::vector<double> selected_ustat(const DataMatrix& data, const KernelSpec& kernel,
                                   std::span<const std::size_t> idx) {
  const std::size_t n = idx.size();
  const std::size_t p = data.p();
  const double nf = static_cast<double>(n);

  switch (kernel.kind()) {
    case KernelKind::Mean: {
      std::vector<double> mean(p, 0.0);
      for (const auto i : idx) {
        const auto row = data.row(i);
        for (std::size_t m = 0; m < p; ++m) mean[m] += row[m];
      }
      for (auto& x : mean) x /= nf;
      return mean;
    }
    case KernelKind::Covariance: {
      std::vector<double> mean(p, 0.0);
      for (const auto i : idx) {
        const auto row = data.row(i);
        for (std::size_t m = 0; m < p; ++m) mean[m] += row[m];
      }
      for (auto& x : mean) x /= nf;
      std::vector<double> out(kernel.output_dim(), 0.0);
      std::vector<double> centered(p);
      for (const auto i : idx) {
        const auto row = data.row(i);
        for (std::size_t m = 0; m < p; ++m) centered[m] = row[m] - mean[m];
        std::size_t j = 0;
        for (std::size_t m = 0; m < p; ++m)
          for (std::size_t k = m; k < p; ++k) out[j++] += centered[m] * centered[k];
      }
      for (auto& x : out) x /= (nf - 1.0);
      return out;
    }
    default: {
      const std::size_t d = kernel.output_dim();
      TreeVectorSum acc(d);
      std::vector<double> h(d);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          kernel.eval(data.row(idx[a]), data.row(idx[b]), h);
          acc.add(h);
        }
      auto out = acc.total();
      for (auto& x : out) x *= 2.0 / (nf * (nf - 1.0));
      return out;
    }
  }
}

}  // namespace

std::vector<double> empirical_draw(const UStatSummary& summary, const DataMatrix& data,
                                   const KernelSpec& kernel,
                                   std::span<const std::size_t> idx) {
  const std::size_t n = data.n();
  if (idx.size() != n)
    throw std::invalid_argument("empirical_draw: index vector length must equal n");
  for (const auto i : idx)
    if (i >= n) throw std::invalid_argument("empirical_draw: index out of range");

  auto out = selected_ustat(data, kernel, idx);
  const double scale = 0.5 * std::sqrt(static_cast<double>(n));
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] = scale * (out[m] - summary.v[m]);
  return out;
}

std::vector<double> reweighted_draw(const UStatSummary& summary, const DataMatrix& data,
                                    const KernelSpec& kernel, std::span<const double> w,
                                    bool flat) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const std::size_t d = kernel.output_dim();
  const double nf = static_cast<double>(n);
  if (w.size() != n)
    throw std::invalid_argument("reweighted_draw: weight vector length must equal n");

  std::vector<double> u_w(d, 0.0);
  switch (kernel.kind()) {
    case KernelKind::Mean: {
      // sum_{i != j} w_i w_j (x_i + x_j)/2 = sum_i w_i (s0 - w_i) x_i
      double s0 = 0.0;
      for (const double wi : w) s0 += wi;
      for (std::size_t i = 0; i < n; ++i) {
        const double c = w[i] * (s0 - w[i]);
        const auto row = data.row(i);
        for (std::size_t m = 0; m < p; ++m) u_w[m] += c * row[m];
      }
      for (auto& x : u_w) x /= nf * (nf - 1.0);
      break;
    }
    case KernelKind::Covariance: {
      // sum_{i != j} w_i w_j h(x_i, x_j) = s0 * sum_i w_i x_i x_i^T - s1 s1^T
      double s0 = 0.0;
      for (const double wi : w) s0 += wi;
      std::vector<double> s1(p, 0.0);
      std::vector<double> s2(d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        const double wi = w[i];
        for (std::size_t m = 0; m < p; ++m) s1[m] += wi * row[m];
        std::size_t j = 0;
        for (std::size_t m = 0; m < p; ++m)
          for (std::size_t k = m; k < p; ++k) s2[j++] += wi * row[m] * row[k];
      }
      std::size_t j = 0;
      for (std::size_t m = 0; m < p; ++m)
        for (std::size_t k = m; k < p; ++k) {
          u_w[j] = (s0 * s2[j] - s1[m] * s1[k]) / (nf * (nf - 1.0));
          ++j;
        }
      break;
    }
    default: {
      TreeVectorSum acc(d);
      std::vector<double> h(d);
      std::vector<double> scaled(d);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          kernel.eval(data.row(a), data.row(b), h);
          const double c = w[a] * w[b];
          for (std::size_t m = 0; m < d; ++m) scaled[m] = c * h[m];
          acc.add(scaled);
        }
      u_w = acc.total();
      for (auto& x : u_w) x *= 2.0 / (nf * (nf - 1.0));
      break;
    }
  }

  const double scale = 0.5 * std::sqrt(nf);
  std::vector<double> out(d);
  for (std::size_t m = 0; m < d; ++m) out[m] = scale * (u_w[m] - summary.u[m]);
  if (flat) {
    double wbar = 0.0;
    for (const double wi : w) wbar += wi;
    wbar /= nf;
    const double centering = std::sqrt(nf) * (wbar - 1.0);
    for (std::size_t m = 0; m < d; ++m) out[m] -= centering * summary.u[m];
  }
  return out;
}

double reduce_functional(const StatFunctional& functional, std::span<const double> v,
                         const KernelSpec& kernel, double rescale) {
  switch (functional.kind) {
    case StatKind::Max: {
      double best = -std::numeric_limits<double>::infinity();
      for (const double x : v) best = std::max(best, rescale * x);
      return best;
    }
    case StatKind::AbsMax: {
      double best = 0.0;
      for (const double x : v) best = std::max(best, std::abs(rescale * x));
      return best;
    }
    case StatKind::OffDiagAbsMax: {
      const TriIndex& idx = kernel.index_map();
      double best = 0.0;
      std::size_t j = 0;
      for (std::size_t m = 0; m < idx.p(); ++m)
        for (std::size_t k = m; k < idx.p(); ++k) {
          if (k != m) best = std::max(best, std::abs(rescale * v[j]));
          ++j;
        }
      return best;
    }
    case StatKind::Rectangle: {
      for (std::size_t m = 0; m < v.size(); ++m) {
        const double x = rescale * v[m];
        if (x < functional.lo[m] || x > functional.hi[m]) return 0.0;
      }
      return 1.0;
    }
  }
  throw std::logic_error("reduce_functional: unreachable");
}

namespace {

void validate_functional(const StatFunctional& functional, const KernelSpec& kernel) {
  if (functional.kind == StatKind::OffDiagAbsMax && !kernel.matrix_structured())
    throw std::invalid_argument(
        "off-diagonal functional requires a matrix-structured kernel");
  if (functional.kind == StatKind::Rectangle) {
    if (functional.scale == StatScale::Rescaled)
      throw std::invalid_argument("rectangle functional does not accept rescaling");
    const std::size_t d = kernel.output_dim();
    if (functional.lo.size() != d || functional.hi.size() != d)
      throw std::invalid_argument("rectangle bounds must have length d");
    for (std::size_t m = 0; m < d; ++m)
      if (functional.lo[m] > functional.hi[m])
        throw std::invalid_argument("rectangle lower bound exceeds upper bound");
  }
}

bool has_fast_path(const KernelSpec& kernel) {
  return kernel.kind() == KernelKind::Mean || kernel.kind() == KernelKind::Covariance;
}

}  // namespace

BootstrapDraws run_bootstrap(const DataMatrix& data, const KernelSpec& kernel,
                             BootstrapMethod method, const StatFunctional& functional,
                             std::size_t B, std::uint64_t seed,
                             const RunOptions& options) {
  if (B < 1) throw std::invalid_argument("run_bootstrap: B must be at least 1");
  validate_functional(functional, kernel);

  const std::size_t n = data.n();
  const std::size_t d = kernel.output_dim();
  const double rescale = functional.scale == StatScale::Rescaled
                             ? 2.0 / std::sqrt(static_cast<double>(n))
                             : 1.0;

  if (method == BootstrapMethod::Multiplier) {
    ComputeOptions copts;
    copts.threads = options.threads;
    copts.dense_dim_limit = options.dense_dim_limit;
    const HajekTable hajek = compute_hajek(data, kernel, copts);
    return run_multiplier_bootstrap(hajek, kernel, functional, B, seed, options);
  }

  if (options.warn_on_cost && !has_fast_path(kernel)) {
    const double cost = static_cast<double>(B) * static_cast<double>(n) *
                        static_cast<double>(n) * static_cast<double>(d);
    if (cost > options.cost_budget)
      std::fprintf(stderr,
                   "ustatboot: projected resampling cost B*n^2*d = %.3g exceeds "
                   "budget %.3g; the multiplier method costs O(B*n*d)\n",
                   cost, options.cost_budget);
  }

  ComputeOptions copts;
  copts.threads = options.threads;
  const UStatSummary summary = compute_ustat(data, kernel, copts);

  BootstrapDraws draws{std::vector<double>(B), method, functional, seed, B};
  const bool flat = method == BootstrapMethod::ReweightedFlat;

  parallel_for(B, options.threads, [&](std::size_t b) {
    CounterRng rng(seed, b);
    std::vector<double> replicate;
    if (method == BootstrapMethod::Empirical) {
      std::vector<std::size_t> idx(n);
      for (auto& i : idx) i = static_cast<std::size_t>(rng.next_index(n));
      replicate = empirical_draw(summary, data, kernel, idx);
    } else {
      std::vector<double> w(n);
      for (auto& wi : w) wi = 1.0 + rng.next_normal();
      replicate = reweighted_draw(summary, data, kernel, w, flat);
    }
    draws.values[b] = reduce_functional(functional, replicate, kernel, rescale);
  });
  return draws;
}

BootstrapDraws run_multiplier_bootstrap(const HajekTable& hajek,
                                        const KernelSpec& kernel,
                                        const StatFunctional& functional,
                                        std::size_t B, std::uint64_t seed,
                                        const RunOptions& options) {
  if (B < 1) throw std::invalid_argument("run_bootstrap: B must be at least 1");
  validate_functional(functional, kernel);
  if (kernel.output_dim() != hajek.d)
    throw std::invalid_argument("projection table does not match kernel");

  const double rescale = functional.scale == StatScale::Rescaled
                             ? 2.0 / std::sqrt(static_cast<double>(hajek.n))
                             : 1.0;
  BootstrapDraws draws{std::vector<double>(B), BootstrapMethod::Multiplier, functional,
                       seed, B};
  parallel_for(B, options.threads, [&](std::size_t b) {
    CounterRng rng(seed, b);
    std::vector<double> e(hajek.n);
    rng.fill_normal(e);
    const auto replicate = multiplier_draw(hajek, e);
    draws.values[b] = reduce_functional(functional, replicate, kernel, rescale);
  });
  return draws;
}

QuantileEstimate quantile(const BootstrapDraws& draws, double alpha) {
  if (draws.values.empty()) throw std::invalid_argument("quantile: no draws");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("quantile: alpha must lie in (0,1)");
  const std::size_t B = draws.values.size();
  auto k = static_cast<std::size_t>(
      std::ceil(alpha * static_cast<double>(B)));
  k = std::clamp<std::size_t>(k, 1, B);
  std::vector<double> sorted(draws.values);
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  return {alpha, sorted[k - 1], B, draws.method};
}

double rectangle_probability(const BootstrapDraws& draws) {
  if (draws.functional.kind != StatKind::Rectangle)
    throw std::invalid_argument(
        "rectangle_probability: draws were not produced with a rectangle functional");
  if (draws.values.empty()) throw std::invalid_argument("rectangle_probability: no draws");
  return pairwise_sum(draws.values) / static_cast<double>(draws.values.size());
}

}  // namespace ustatboot
