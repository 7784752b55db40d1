#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "ustatboot/matrix.hpp"

namespace ustatboot {

enum class KernelKind { Mean, Covariance, KendallTau, Custom };

/// Symmetric pairwise evaluator for custom kernels: writes h(x1,x2) into out.
using KernelFn = std::function<void(std::span<const double> x1,
                                    std::span<const double> x2,
                                    std::span<double> out)>;

/// Identifies a symmetric order-two kernel h : R^p x R^p -> R^d together with
/// its flattened output layout. Matrix-valued kernels store the upper
/// triangle (diagonal included), d = p(p+1)/2.
class KernelSpec {
public:
  static KernelSpec mean(std::size_t p);
  static KernelSpec covariance(std::size_t p);
  static KernelSpec kendall_tau(std::size_t p);
  static KernelSpec custom(std::size_t p, std::size_t d, KernelFn fn,
                           bool matrix_structured = false);

  KernelKind kind() const { return kind_; }
  std::size_t input_dim() const { return p_; }
  std::size_t output_dim() const { return d_; }

  /// True when the d outputs carry symmetric p x p matrix structure, so
  /// off-diagonal masking and matrix reconstruction make sense.
  bool matrix_structured() const { return index_map_ != nullptr; }
  const TriIndex& index_map() const;

  /// Evaluate h(x1,x2); x1 and x2 must have length p, out length d.
  /// Built-in kernels are symmetric entrywise-exactly and defined at x1 == x2.
  void eval(std::span<const double> x1, std::span<const double> x2,
            std::span<double> out) const;

  std::string_view name() const;

private:
  KernelSpec(KernelKind kind, std::size_t p, std::size_t d, bool matrix, KernelFn fn);

  KernelKind kind_;
  std::size_t p_;
  std::size_t d_;
  std::shared_ptr<const TriIndex> index_map_;
  KernelFn custom_fn_;
};

/// Parse a CLI kernel name ("mean" | "cov" | "kendall") for dimension p.
KernelSpec parse_kernel(std::string_view name, std::size_t p);

/// Observation matrix: n rows of p-dimensional samples. Validates on
/// construction that every entry is finite and n >= 2.
class DataMatrix {
public:
  explicit DataMatrix(Matrix values);

  std::size_t n() const { return values_.rows(); }
  std::size_t p() const { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  const Matrix& values() const { return values_; }

private:
  Matrix values_;
};

}  // namespace ustatboot
