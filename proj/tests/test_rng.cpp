#include <stdexcept>
#include <cmath>
#include <set>

#include "doctest.h"
#include "ustatboot/numeric.hpp"
#include "ustatboot/rng.hpp"

using namespace ustatboot;

// Frozen outputs of numpy.random.Philox (a Random123 port) for the same
// counter/key layout; pins the block function to the reference algorithm.
TEST_CASE("philox4x64 known answers") {
  auto v = philox4x64({1, 0, 0, 0}, {0, 0});
  CHECK(v[0] == 0x02f4ba6408e4d89bULL);
  CHECK(v[1] == 0x3dd62b0b9ca8c5b2ULL);
  CHECK(v[2] == 0x1c8667a55d902e79ULL);
  CHECK(v[3] == 0x907d7a052fd5b4dcULL);

  v = philox4x64({1, 0, 0, 0}, {0xdeadbeefULL, 0});
  CHECK(v[0] == 0xa4e930dc738acaf1ULL);
  CHECK(v[3] == 0x66f3c896201f7262ULL);

  v = philox4x64({6, 0, 0, 0}, {42, 0});
  CHECK(v[0] == 0xf7972d5900f0627aULL);
  CHECK(v[2] == 0x7a13b352cdc90fadULL);

  v = philox4x64({8, 1, 0, 0}, {0x123456789ABCDEF0ULL, 0xABCDEF0123456789ULL});
  CHECK(v[0] == 0xaffd8971ca1b9644ULL);
  v = philox4x64({9, 1, 0, 0}, {0x123456789ABCDEF0ULL, 0xABCDEF0123456789ULL});
  CHECK(v[0] == 0x0949dec4f2a726bcULL);
  CHECK(v[3] == 0x651cac85f319cb38ULL);
}

TEST_CASE("streams are reproducible and distinct") {
  CounterRng a(123, 7), b(123, 7), c(123, 8), d(124, 7);
  bool same_ab = true, same_ac = true, same_ad = true;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u64();
    same_ab &= (x == b.next_u64());
    same_ac &= (x == c.next_u64());
    same_ad &= (x == d.next_u64());
  }
  CHECK(same_ab);
  CHECK_FALSE(same_ac);
  CHECK_FALSE(same_ad);
}

TEST_CASE("uniform draws live strictly inside (0,1)") {
  CounterRng rng(5, 0);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.next_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 20000 - 0.5) < 0.01);
}

TEST_CASE("normal quantile inverts the normal cdf") {
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.975, 1 - 1e-6}) {
    const double x = normal_quantile(p);
    CHECK(std::abs(normal_cdf(x) - p) <= 1e-13);
  }
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("normal draws have the right first two moments") {
  CounterRng rng(99, 1);
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("index draws are unbiased over the range") {
  CounterRng rng(321, 2);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const auto k = rng.next_index(5);
    REQUIRE(k < 5);
    ++counts[k];
  }
  for (const int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("gamma and chi-squared moments") {
  CounterRng rng(17, 3);
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gamma(2.5);
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 2.5) < 0.05);
  CHECK(std::abs(sq / n - mean * mean - 2.5) < 0.15);

  double csum = 0.0;
  for (int i = 0; i < n; ++i) csum += rng.next_chi_squared(10.0);
  CHECK(std::abs(csum / n - 10.0) < 0.15);

  // shape < 1 goes through the boosting identity
  double small = 0.0;
  for (int i = 0; i < n; ++i) small += rng.next_gamma(0.5);
  CHECK(std::abs(small / n - 0.5) < 0.05);
}

TEST_CASE("derived seeds separate stream families") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t tag = 0; tag < 8; ++tag)
    for (std::uint64_t i = 0; i < 64; ++i) seen.insert(derive_seed(42, tag, i));
  CHECK(seen.size() == 8 * 64);
}

TEST_CASE("pairwise sums match plain sums on benign input") {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (1.0 + static_cast<double>(i));
  double plain = 0.0;
  for (const double x : xs) plain += x;
  CHECK(pairwise_sum(xs) == doctest::Approx(plain).epsilon(1e-14));

  TreeVectorSum acc(2);
  for (int i = 0; i < 1000; ++i) {
    const double v[2] = {1.0, -0.5};
    acc.add(v);
  }
  const auto total = acc.total();
  CHECK(total[0] == doctest::Approx(1000.0));
  CHECK(total[1] == doctest::Approx(-500.0));
}
