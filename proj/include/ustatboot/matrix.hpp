#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ustatboot {

/// Dense row-major matrix of doubles. Deliberately small: the library only
/// needs storage, row views and a handful of factorizations.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Flat indexing for the upper triangle (including the diagonal) of a
/// symmetric p x p matrix, row-major: (m,k) with m <= k maps to
/// j = m*p - m(m-1)/2 + (k-m), so dim() = p(p+1)/2.
class TriIndex {
public:
  explicit TriIndex(std::size_t p);

  std::size_t p() const { return p_; }
  std::size_t dim() const { return dim_; }

  std::size_t flat(std::size_t m, std::size_t k) const {
    if (m > k) std::swap(m, k);
    return row_start_[m] + (k - m);
  }
  std::pair<std::size_t, std::size_t> unflat(std::size_t j) const;
  bool is_diagonal(std::size_t j) const { return unflat(j).first == unflat(j).second; }

private:
  std::size_t p_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_start_;
};

/// Expand a flattened upper triangle back into the full symmetric p x p view.
Matrix unflatten_symmetric(std::span<const double> flat, std::size_t p);

/// Flatten the upper triangle (including diagonal) of a symmetric matrix.
std::vector<double> flatten_symmetric(const Matrix& m);

/// Lower-triangular Cholesky-type factor L with A ~= L L^T for a symmetric
/// positive semidefinite A. Pivots within rel_tol of zero (relative to the
/// largest diagonal entry) are treated as exact zeros and their columns are
/// zeroed out, so rank-deficient inputs are accepted. Throws numerical_error
/// when a pivot is negative beyond tolerance.
Matrix cholesky_psd(const Matrix& a, double rel_tol = 1e-12);

}  // namespace ustatboot
