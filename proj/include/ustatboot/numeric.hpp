#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ustatboot {

/// Pairwise (tree) summation; error grows like O(log n) instead of O(n).
double pairwise_sum(std::span<const double> x);

/// Pairwise reduction of a stream of equal-length vectors: partial sums are
/// kept at power-of-two ranks and merged when ranks collide, so the result
/// depends only on the push order, never on chunking.
class TreeVectorSum {
public:
  explicit TreeVectorSum(std::size_t dim);

  void add(std::span<const double> v);
  /// Collapse all partials (lowest rank first) into the result.
  std::vector<double> total() const;
  std::size_t dim() const { return dim_; }

private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> scratch_;
  std::vector<std::vector<double>> levels_;  // levels_[r] holds 2^r summands
  std::vector<bool> occupied_;
};

/// Standard normal cdf.
double normal_cdf(double x);

/// Standard normal quantile (inverse cdf) for p in (0,1); rational
/// approximation accurate to full double precision in the interior.
double normal_quantile(double p);

}  // namespace ustatboot
