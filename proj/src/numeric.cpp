#include "ustatboot/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace ustatboot {

namespace {

double pairwise_sum_rec(const double* x, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_rec(x, half) + pairwise_sum_rec(x + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> x) {
  return pairwise_sum_rec(x.data(), x.size());
}

TreeVectorSum::TreeVectorSum(std::size_t dim) : dim_(dim) {}

void TreeVectorSum::add(std::span<const double> v) {
  if (v.size() != dim_) throw std::invalid_argument("TreeVectorSum: dimension mismatch");
  scratch_.assign(v.begin(), v.end());
  std::size_t rank = 0;
  while (rank < levels_.size() && occupied_[rank]) {
    const auto& slot = levels_[rank];
    for (std::size_t i = 0; i < dim_; ++i) scratch_[i] += slot[i];
    occupied_[rank] = false;
    ++rank;
  }
  if (rank == levels_.size()) {
    levels_.emplace_back();
    occupied_.push_back(false);
  }
  levels_[rank].swap(scratch_);  // keeps capacity circulating, no steady-state allocs
  occupied_[rank] = true;
  ++count_;
}

std::vector<double> TreeVectorSum::total() const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t rank = 0; rank < levels_.size(); ++rank) {
    if (!occupied_[rank]) continue;
    for (std::size_t i = 0; i < dim_; ++i) out[i] += levels_[rank][i];
  }
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Rational approximation of the normal quantile (Wichura's PPND16 scheme):
// a central rational fit in q = p - 1/2 and two tail fits in sqrt(-log r).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");

  static const double a[8] = {
      3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3};
  static const double b[8] = {
      1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
      5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
      2.8729085735721942674e4, 5.2264952788528545610e3};
  static const double c[8] = {
      1.42343711074968357734e0, 4.63033784615654529590e0,
      5.76949722146069140550e0, 3.64784832476320460504e0,
      1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static const double d[8] = {
      1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1,
      1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9};
  static const double e[8] = {
      6.65790464350110377720e0, 5.46378491116411436990e0,
      1.78482653991729133580e0, 2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static const double f[8] = {
      1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4,
      1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15};

  auto horner = [](const double (&k)[8], double r) {
    return ((((((k[7] * r + k[6]) * r + k[5]) * r + k[4]) * r + k[3]) * r +
             k[2]) * r + k[1]) * r + k[0];
  };

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, r) / horner(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = horner(c, r) / horner(d, r);
  } else {
    r -= 5.0;
    value = horner(e, r) / horner(f, r);
  }
  return q < 0.0 ? -value : value;
}

}  // namespace ustatboot
