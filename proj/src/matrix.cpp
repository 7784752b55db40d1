#include "ustatboot/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ustatboot/errors.hpp"

namespace ustatboot {

TriIndex::TriIndex(std::size_t p) : p_(p), dim_(p * (p + 1) / 2) {
  if (p == 0) throw std::invalid_argument("TriIndex: p must be positive");
  row_start_.resize(p + 1);
  std::size_t acc = 0;
  for (std::size_t m = 0; m < p; ++m) {
    row_start_[m] = acc;
    acc += p - m;
  }
  row_start_[p] = acc;
}

std::pair<std::size_t, std::size_t> TriIndex::unflat(std::size_t j) const {
  if (j >= dim_) throw std::invalid_argument("TriIndex: flat index out of range");
  auto it = std::upper_bound(row_start_.begin(), row_start_.end(), j);
  std::size_t m = static_cast<std::size_t>(it - row_start_.begin()) - 1;
  return {m, m + (j - row_start_[m])};
}

Matrix unflatten_symmetric(std::span<const double> flat, std::size_t p) {
  TriIndex idx(p);
  if (flat.size() != idx.dim())
    throw std::invalid_argument("unflatten_symmetric: length does not match p(p+1)/2");
  Matrix full(p, p);
  for (std::size_t m = 0; m < p; ++m)
    for (std::size_t k = m; k < p; ++k) {
      double v = flat[idx.flat(m, k)];
      full(m, k) = v;
      full(k, m) = v;
    }
  return full;
}

std::vector<double> flatten_symmetric(const Matrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("flatten_symmetric: matrix must be square");
  TriIndex idx(m.rows());
  std::vector<double> flat(idx.dim());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = r; c < m.cols(); ++c) flat[idx.flat(r, c)] = m(r, c);
  return flat;
}

Matrix cholesky_psd(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("cholesky_psd: matrix must be square");
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double tol = rel_tol * std::max(max_diag, 1e-300);

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double piv = a(j, j);
    for (std::size_t k = 0; k < j; ++k) piv -= l(j, k) * l(j, k);
    if (piv < -tol)
      throw numerical_error("cholesky_psd: matrix is not positive semidefinite");
    if (piv <= tol) {
      // rank-deficient column; leave it zero
      continue;
    }
    const double root = std::sqrt(piv);
    l(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / root;
    }
  }
  return l;
}

}  // namespace ustatboot
