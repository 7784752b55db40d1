#include "ustatboot/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace ustatboot {

KernelSpec::KernelSpec(KernelKind kind, std::size_t p, std::size_t d, bool matrix,
                       KernelFn fn)
    : kind_(kind), p_(p), d_(d), custom_fn_(std::move(fn)) {
  if (p == 0) throw std::invalid_argument("kernel: input dimension must be positive");
  if (d == 0) throw std::invalid_argument("kernel: output dimension must be positive");
  if (matrix) {
    index_map_ = std::make_shared<TriIndex>(p);
    if (index_map_->dim() != d)
      throw std::invalid_argument("kernel: matrix-structured output must have length p(p+1)/2");
  }
}

KernelSpec KernelSpec::mean(std::size_t p) {
  return KernelSpec(KernelKind::Mean, p, p, false, nullptr);
}

KernelSpec KernelSpec::covariance(std::size_t p) {
  return KernelSpec(KernelKind::Covariance, p, p * (p + 1) / 2, true, nullptr);
}

KernelSpec KernelSpec::kendall_tau(std::size_t p) {
  return KernelSpec(KernelKind::KendallTau, p, p * (p + 1) / 2, true, nullptr);
}

KernelSpec KernelSpec::custom(std::size_t p, std::size_t d, KernelFn fn,
                              bool matrix_structured) {
  if (!fn) throw std::invalid_argument("kernel: custom evaluator must be callable");
  return KernelSpec(KernelKind::Custom, p, d, matrix_structured, std::move(fn));
}

const TriIndex& KernelSpec::index_map() const {
  if (!index_map_)
    throw std::invalid_argument("kernel: output carries no matrix structure");
  return *index_map_;
}

void KernelSpec::eval(std::span<const double> x1, std::span<const double> x2,
                      std::span<double> out) const {
  if (x1.size() != p_ || x2.size() != p_)
    throw std::invalid_argument("kernel: input length does not match input_dim");
  if (out.size() != d_)
    throw std::invalid_argument("kernel: output length does not match output_dim");

  switch (kind_) {
    case KernelKind::Mean:
      for (std::size_t m = 0; m < p_; ++m) out[m] = 0.5 * (x1[m] + x2[m]);
      return;
    case KernelKind::Covariance: {
      std::size_t j = 0;
      for (std::size_t m = 0; m < p_; ++m) {
        const double dm = x1[m] - x2[m];
        for (std::size_t k = m; k < p_; ++k) out[j++] = 0.5 * dm * (x1[k] - x2[k]);
      }
      return;
    }
    case KernelKind::KendallTau: {
      // strict concordance indicator; ties and the diagonal with x1[m]==x2[m]
      // give 0
      std::size_t j = 0;
      for (std::size_t m = 0; m < p_; ++m) {
        const double dm = x1[m] - x2[m];
        for (std::size_t k = m; k < p_; ++k)
          out[j++] = (dm * (x1[k] - x2[k]) > 0.0) ? 1.0 : 0.0;
      }
      return;
    }
    case KernelKind::Custom:
      custom_fn_(x1, x2, out);
      return;
  }
}

std::string_view KernelSpec::name() const {
  switch (kind_) {
    case KernelKind::Mean: return "mean";
    case KernelKind::Covariance: return "cov";
    case KernelKind::KendallTau: return "kendall";
    case KernelKind::Custom: return "custom";
  }
  return "unknown";
}

KernelSpec parse_kernel(std::string_view name, std::size_t p) {
  if (name == "mean") return KernelSpec::mean(p);
  if (name == "cov" || name == "covariance") return KernelSpec::covariance(p);
  if (name == "kendall" || name == "kendall-tau") return KernelSpec::kendall_tau(p);
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected mean, cov or kendall)");
}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2)
    throw std::invalid_argument("data: need at least 2 observations");
  if (values_.cols() < 1)
    throw std::invalid_argument("data: need at least 1 column");
  for (std::size_t i = 0; i < values_.rows(); ++i)
    for (std::size_t j = 0; j < values_.cols(); ++j)
      if (!std::isfinite(values_(i, j)))
        throw std::invalid_argument("data: non-finite entry at row " +
                                    std::to_string(i + 1) + ", column " +
                                    std::to_string(j + 1));
}

}  // namespace ustatboot
