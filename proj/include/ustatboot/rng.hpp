#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "ustatboot/numeric.hpp"

namespace ustatboot {

/// philox4x64-10 block function: 4 output words from a 256-bit counter and a
/// 128-bit key. Stateless, so streams are cheap to split and replay.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Deterministic seed derivation for nested stream families
/// (splitmix64-style mixing of seed, tag and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t index);

/// Counter-based random stream keyed by (seed, stream). Distinct stream ids
/// under one seed are independent, and every value depends only on
/// (seed, stream, position), never on how work is divided among threads.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{seed, stream}, counter_{0, 0, 0, 0} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  /// Uniform on the open interval (0,1) with 53-bit resolution.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the inverse-cdf transform (stream-stable).
  double next_normal() { return normal_quantile(next_uniform()); }

  /// Uniform integer in [0, n) by rejection; unbiased for any n >= 1.
  std::uint64_t next_index(std::uint64_t n);

  /// Gamma(shape, scale=1), Marsaglia-Tsang squeeze for shape >= 1 and the
  /// boosting identity for shape < 1.
  double next_gamma(double shape);

  double next_chi_squared(double dof) { return 2.0 * next_gamma(0.5 * dof); }

  void fill_normal(std::span<double> out) {
    for (auto& x : out) x = next_normal();
  }

private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_;
  std::array<std::uint64_t, 4> block_{};
  unsigned pos_ = 4;
};

}  // namespace ustatboot
