#include <stdexcept>
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"
#include "ustatboot/applications.hpp"
#include "ustatboot/errors.hpp"
#include "ustatboot/ustat.hpp"

using namespace ustatboot;
using namespace ustatboot::testutil;

namespace {

DataMatrix column_data(std::vector<double> values) {
  Matrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return DataMatrix(std::move(m));
}

}  // namespace

TEST_CASE("mean kernel ustat is the sample mean") {
  const auto data = column_data({1, 3});
  const auto s = compute_ustat(data, KernelSpec::mean(1));
  CHECK(s.u == std::vector<double>{2});
  CHECK(s.v == std::vector<double>{2});
}

TEST_CASE("covariance kernel ustat gives unbiased and biased variances") {
  const auto data = column_data({0, 2});
  const auto s = compute_ustat(data, KernelSpec::covariance(1));
  CHECK(s.u[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.v[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("three-point variance against the enumeration value") {
  const auto data = column_data({0, 1, 2});
  const auto s = compute_ustat(data, KernelSpec::covariance(1));
  CHECK(s.u[0] == doctest::Approx(1.0).epsilon(1e-14));
  const auto ref = oracle::ustat(data, KernelSpec::covariance(1));
  CHECK(std::abs(s.u[0] - ref[0]) <= 1e-14);
}

TEST_CASE("fast paths agree with the literal double loop") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = gaussian_data(23, 4, seed, 2.0);

    const auto cov = KernelSpec::covariance(4);
    const auto s_cov = compute_ustat(data, cov);
    const auto o_cov = oracle::ustat(data, cov);
    const auto ov_cov = oracle::vstat(data, cov);
    CHECK(max_abs_diff(s_cov.u, o_cov) <= 1e-10 * (1.0 + max_abs(o_cov)));
    CHECK(max_abs_diff(s_cov.v, ov_cov) <= 1e-10 * (1.0 + max_abs(ov_cov)));
    oracle::mark_fast_path("ustat.cov");

    const auto mean = KernelSpec::mean(4);
    const auto s_mean = compute_ustat(data, mean);
    const auto o_mean = oracle::ustat(data, mean);
    CHECK(max_abs_diff(s_mean.u, o_mean) <= 1e-12);
    oracle::mark_fast_path("ustat.mean");
  }
}

TEST_CASE("kendall path matches the literal loop exactly") {
  // indicator sums are exact in floating point, even with ties
  const auto data = random_integer_data(17, 3, 99);
  const auto kernel = KernelSpec::kendall_tau(3);
  const auto s = compute_ustat(data, kernel);
  const auto ref = oracle::ustat(data, kernel);
  CHECK(max_abs_diff(s.u, ref) <= 1e-14);
  for (const double x : s.u) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("u and v statistics satisfy the diagonal identity") {
  const auto data = gaussian_data(12, 3, 5);
  for (const auto& kernel :
       {KernelSpec::covariance(3), KernelSpec::mean(3), KernelSpec::kendall_tau(3)}) {
    const auto s = compute_ustat(data, kernel);
    const double nf = static_cast<double>(s.n);
    for (std::size_t m = 0; m < s.u.size(); ++m)
      CHECK(s.v[m] == ((nf - 1.0) * s.u[m] + s.diag_mean[m]) / nf);
  }
}

TEST_CASE("ustat is invariant under row permutation") {
  const auto base = random_matrix(31, 3, 77);
  Matrix shuffled = base;
  // reverse plus a swap, a fixed nontrivial permutation
  for (std::size_t i = 0; i < shuffled.rows() / 2; ++i)
    for (std::size_t c = 0; c < shuffled.cols(); ++c)
      std::swap(shuffled(i, c), shuffled(shuffled.rows() - 1 - i, c));
  const auto kernel = KernelSpec::covariance(3);
  const auto a = compute_ustat(DataMatrix(base), kernel);
  const auto b = compute_ustat(DataMatrix(shuffled), kernel);
  CHECK(max_abs_diff(a.u, b.u) <= 1e-12 * (1.0 + max_abs(a.u)));
}

TEST_CASE("worker count never changes the result") {
  const auto data = gaussian_data(40, 3, 123);
  const auto kernel = KernelSpec::kendall_tau(3);
  ComputeOptions one, many;
  one.threads = 1;
  many.threads = 8;
  CHECK(compute_ustat(data, kernel, one).u == compute_ustat(data, kernel, many).u);
  CHECK(compute_hajek(data, kernel, one).ghat == compute_hajek(data, kernel, many).ghat);
}

TEST_CASE("projection table values for the three-point sample") {
  const auto data = column_data({0, 1, 2});
  const auto table = compute_hajek(data, KernelSpec::covariance(1));
  CHECK(table.ghat(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(table.ghat(1, 0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(table.ghat(2, 0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("projection columns sum to zero") {
  const auto data = gaussian_data(25, 3, 11, 3.0);
  for (const auto& kernel :
       {KernelSpec::covariance(3), KernelSpec::mean(3), KernelSpec::kendall_tau(3)}) {
    const auto table = compute_hajek(data, kernel);
    double scale = 1.0;
    for (const auto& v : table.ghat.values()) scale = std::max(scale, std::abs(v));
    for (std::size_t m = 0; m < table.d; ++m) {
      double sum = 0.0;
      for (std::size_t i = 0; i < table.n; ++i) sum += table.ghat(i, m);
      CHECK(std::abs(sum) <= 1e-10 * scale * static_cast<double>(table.n));
    }
  }
}

TEST_CASE("constant samples have zero projections") {
  Matrix m(6, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    m(i, 0) = 3.0;
    m(i, 1) = -1.0;
  }
  const auto table = compute_hajek(DataMatrix(m), KernelSpec::covariance(2));
  for (const double v : table.ghat.values()) CHECK(v == 0.0);
}

TEST_CASE("projection fast paths agree with the literal loops") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const auto data = gaussian_data(14, 3, seed);
    for (const auto& kernel : {KernelSpec::covariance(3), KernelSpec::mean(3)}) {
      const auto table = compute_hajek(data, kernel);
      const auto ref = oracle::hajek(data, kernel);
      CHECK(max_abs_diff(table.ghat, ref) <= 1e-11);
      oracle::mark_fast_path(kernel.kind() == KernelKind::Covariance ? "hajek.cov"
                                                                     : "hajek.mean");
    }
  }
}

TEST_CASE("projection table requires three observations") {
  const auto data = column_data({0, 2});
  CHECK_THROWS_AS(compute_hajek(data, KernelSpec::covariance(1)),
                  std::invalid_argument);
}

TEST_CASE("multiplier covariance of the three-point sample") {
  const auto data = column_data({0, 1, 2});
  const auto table = compute_hajek(data, KernelSpec::covariance(1));
  const auto est = multiplier_cov(table);
  CHECK(est.kind == CovKind::Multiplier);
  CHECK(est.matrix(0, 0) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("multiplier covariance of zero projections is zero") {
  Matrix m(5, 1, 4.25);
  const auto table = compute_hajek(DataMatrix(m), KernelSpec::covariance(1));
  const auto est = multiplier_cov(table);
  CHECK(est.matrix(0, 0) == 0.0);
}

TEST_CASE("multiplier covariance equals the scaled jackknife triple sum") {
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    const auto data = gaussian_data(10, 4, seed);
    const auto kernel = KernelSpec::mean(4);  // d = 4
    const auto table = compute_hajek(data, kernel);
    const auto tilde = multiplier_cov(table);
    const auto jk = oracle::jackknife_triple_sum(data, kernel);

    const double nf = 10.0;
    const double scale = (nf - 2.0) * (nf - 2.0) / (nf * (nf - 1.0));
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        CHECK(std::abs(tilde.matrix(a, b) - scale * jk(a, b)) <= 1e-10);

    // and the jackknife accessor matches the literal sum directly
    const auto jk_est = jackknife_cov(table);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        CHECK(std::abs(jk_est.matrix(a, b) - jk(a, b)) <= 1e-10);
  }
}

TEST_CASE("mean-kernel jackknife matches its closed form") {
  const auto data = gaussian_data(20, 3, 50);
  const auto table = compute_hajek(data, KernelSpec::mean(3));
  const auto jk = jackknife_cov(table);

  std::vector<double> mean(3, 0.0);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t m = 0; m < 3; ++m) mean[m] += data.values()(i, m);
  for (auto& x : mean) x /= 20.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < 20; ++i)
        s += (data.values()(i, a) - mean[a]) * (data.values()(i, b) - mean[b]);
      s /= 4.0 * (20.0 - 1.0);
      CHECK(std::abs(jk.matrix(a, b) - s) <= 1e-12);
    }
}

TEST_CASE("bootstrap conditional covariance for tiny samples") {
  const auto data = column_data({0, 2});
  const auto est = eb_cov(data, KernelSpec::covariance(1));
  CHECK(est.matrix(0, 0) == doctest::Approx(0.0).epsilon(1e-15));

  Matrix constant(4, 2, 1.5);
  const auto zero = eb_cov(DataMatrix(constant), KernelSpec::covariance(2));
  for (const double v : zero.matrix.values()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("bootstrap conditional covariance matches the triple sum") {
  for (std::uint64_t seed = 60; seed < 64; ++seed) {
    const auto data = gaussian_data(8, 2, seed);
    const auto kernel = KernelSpec::covariance(2);  // d = 3
    const auto est = eb_cov(data, kernel);
    const auto ref = oracle::eb_cov_triple_sum(data, kernel);
    CHECK(max_abs_diff(est.matrix, ref) <= 1e-12);

    const auto diag = eb_cov_diagonal(data, kernel);
    for (std::size_t m = 0; m < diag.size(); ++m)
      CHECK(std::abs(diag[m] - ref(m, m)) <= 1e-12);
  }
}

TEST_CASE("half-sample estimator") {
  CHECK(split_sum(column_data({1, 3}), KernelSpec::mean(1)) == std::vector<double>{2});
  CHECK(split_sum(column_data({0, 1, 2, 3}), KernelSpec::covariance(1)) ==
        std::vector<double>{2});
  // odd n drops the last row: only the pair (x1, x2) remains
  const auto odd = split_sum(column_data({0, 1, 2}), KernelSpec::covariance(1));
  CHECK(odd[0] == doctest::Approx(0.5).epsilon(1e-15));
  const auto data = gaussian_data(9, 2, 3);
  const auto kernel = KernelSpec::covariance(2);
  CHECK(max_abs_diff(split_sum(data, kernel), oracle::split_sum(data, kernel)) <= 1e-14);
}

TEST_CASE("multiplier covariance is positive semidefinite") {
  for (std::uint64_t seed = 70; seed < 73; ++seed) {
    const auto data = gaussian_data(15, 3, seed);
    const auto table = compute_hajek(data, KernelSpec::covariance(3));
    const auto tilde = multiplier_cov(table);
    const double top = matrix_norms(tilde.matrix).spectral;

    // smallest eigenvalue via the shifted spectrum
    Matrix shifted(tilde.matrix.rows(), tilde.matrix.cols());
    for (std::size_t a = 0; a < shifted.rows(); ++a)
      for (std::size_t b = 0; b < shifted.cols(); ++b)
        shifted(a, b) = (a == b ? top : 0.0) - tilde.matrix(a, b);
    const double lambda_min = top - matrix_norms(shifted).spectral;
    CHECK(lambda_min >= -1e-10 * top);
  }
}

TEST_CASE("dense materializations respect the dimension limit") {
  const auto data = gaussian_data(8, 3, 9);
  const auto kernel = KernelSpec::covariance(3);  // d = 6
  ComputeOptions limited;
  limited.dense_dim_limit = 4;
  const auto table = compute_hajek(data, kernel, limited);
  CHECK_THROWS_AS(multiplier_cov(table, limited), resource_limit_error);
  CHECK_THROWS_AS(eb_cov(data, kernel, limited), resource_limit_error);
  CHECK(multiplier_cov_diagonal(table).size() == 6);  // always available
  CHECK(eb_cov_diagonal(data, kernel).size() == 6);
}

TEST_CASE("oracle guards refuse oversized inputs") {
  const auto data = gaussian_data(250, 1, 1);
  CHECK_THROWS_AS(oracle::ustat(data, KernelSpec::mean(1)), resource_limit_error);

  const auto eight = gaussian_data(8, 1, 2);  // 8^8 tuples exceed the guard
  CHECK_THROWS_AS(
      oracle::eb_enumeration(eight, KernelSpec::covariance(1), StatFunctional::max()),
      resource_limit_error);

  const auto wide = gaussian_data(10, 12, 3);  // d = 78 > 64
  CHECK_THROWS_AS(oracle::jackknife_triple_sum(wide, KernelSpec::covariance(12)),
                  resource_limit_error);
}
