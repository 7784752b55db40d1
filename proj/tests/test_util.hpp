#pragma once

#include <cstdint>
#include <vector>

#include "ustatboot/kernels.hpp"
#include "ustatboot/matrix.hpp"
#include "ustatboot/rng.hpp"

namespace ustatboot::testutil {

inline Matrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed,
                            double scale = 1.0) {
  CounterRng rng(seed, 0xfeed);
  Matrix m(n, p);
  for (auto& x : m.values()) x = scale * rng.next_normal();
  return m;
}

inline DataMatrix gaussian_data(std::size_t n, std::size_t p, std::uint64_t seed,
                              double scale = 1.0) {
  return DataMatrix(random_matrix(n, p, seed, scale));
}

// integer-valued data, useful for exercising ties in rank kernels
inline DataMatrix random_integer_data(std::size_t n, std::size_t p,
                                      std::uint64_t seed, std::uint64_t levels = 4) {
  CounterRng rng(seed, 0xd1ce);
  Matrix m(n, p);
  for (auto& x : m.values())
    x = static_cast<double>(rng.next_index(levels));
  return DataMatrix(std::move(m));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return max_abs_diff(a.values(), b.values());
}

inline double max_abs(const std::vector<double>& a) {
  double worst = 0.0;
  for (const double x : a) worst = std::max(worst, std::abs(x));
  return worst;
}

}  // namespace ustatboot::testutil
