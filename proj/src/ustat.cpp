#include "ustatboot/ustat.hpp"

#include <cmath>
#include <stdexcept>

#include "ustatboot/errors.hpp"
#include "ustatboot/numeric.hpp"
#include "ustatboot/parallel.hpp"

namespace ustatboot {

namespace {

constexpr std::size_t kRowBlock = 16;

void check_kernel(const DataMatrix& data, const KernelSpec& kernel) {
  if (kernel.input_dim() != data.p())
    throw std::invalid_argument("kernel input_dim does not match data dimension");
}

// Column means via tree reduction over rows.
std::vector<double> column_means(const Matrix& x) {
  TreeVectorSum acc(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) acc.add(x.row(i));
  auto total = acc.total();
  for (auto& t : total) t /= static_cast<double>(x.rows());
  return total;
}

std::vector<double> diag_kernel_mean(const DataMatrix& data, const KernelSpec& kernel) {
  const std::size_t n = data.n();
  const std::size_t d = kernel.output_dim();
  TreeVectorSum acc(d);
  std::vector<double> h(d);
  for (std::size_t i = 0; i < n; ++i) {
    kernel.eval(data.row(i), data.row(i), h);
    acc.add(h);
  }
  auto total = acc.total();
  for (auto& t : total) t /= static_cast<double>(n);
  return total;
}

// Off-diagonal pair sum over i < j, tree-accumulated in fixed row-block
// order; worker count never changes the reduction order.
std::vector<double> pair_sum(const DataMatrix& data, const KernelSpec& kernel,
                             unsigned threads) {
  const std::size_t n = data.n();
  const std::size_t d = kernel.output_dim();
  const std::size_t blocks = (n + kRowBlock - 1) / kRowBlock;
  std::vector<std::vector<double>> partial(blocks);

  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t lo = b * kRowBlock;
    const std::size_t hi = std::min(n, lo + kRowBlock);
    TreeVectorSum acc(d);
    std::vector<double> h(d);
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        kernel.eval(data.row(i), data.row(j), h);
        acc.add(h);
      }
    partial[b] = acc.total();
  });

  TreeVectorSum acc(d);
  for (const auto& part : partial) acc.add(part);
  return acc.total();
}

std::vector<double> flatten_outer(std::span<const double> x) {
  const std::size_t p = x.size();
  std::vector<double> out(p * (p + 1) / 2);
  std::size_t j = 0;
  for (std::size_t m = 0; m < p; ++m)
    for (std::size_t k = m; k < p; ++k) out[j++] = x[m] * x[k];
  return out;
}

void check_dense_limit(std::size_t d, const ComputeOptions& options) {
  if (d > options.dense_dim_limit)
    throw resource_limit_error(
        "dense " + std::to_string(d) + "x" + std::to_string(d) +
        " matrix exceeds the dimension limit " +
        std::to_string(options.dense_dim_limit) +
        "; use the diagonal variant or raise the limit");
}

// n^{-1} * rows^T rows without materializing anything larger than d x d.
Matrix scaled_gram(const Matrix& rows, double scale, unsigned threads) {
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols();
  Matrix out(d, d);
  parallel_for(d, threads, [&](std::size_t a) {
    std::vector<double> prod(n);
    for (std::size_t b = a; b < d; ++b) {
      for (std::size_t i = 0; i < n; ++i) prod[i] = rows(i, a) * rows(i, b);
      const double value = scale * pairwise_sum(prod);
      out(a, b) = value;
      out(b, a) = value;
    }
  });
  return out;
}

}  // namespace

UStatSummary compute_ustat(const DataMatrix& data, const KernelSpec& kernel,
                           const ComputeOptions& options) {
  check_kernel(data, kernel);
  const std::size_t n = data.n();
  const double nf = static_cast<double>(n);
  UStatSummary summary{{}, {}, {}, n, kernel};

  switch (kernel.kind()) {
    case KernelKind::Mean: {
      summary.u = column_means(data.values());
      summary.diag_mean = summary.u;
      break;
    }
    case KernelKind::Covariance: {
      const auto mean = column_means(data.values());
      const std::size_t p = data.p();
      TreeVectorSum acc(kernel.output_dim());
      std::vector<double> centered(p);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        for (std::size_t m = 0; m < p; ++m) centered[m] = row[m] - mean[m];
        acc.add(flatten_outer(centered));
      }
      summary.u = acc.total();
      for (auto& x : summary.u) x /= (nf - 1.0);
      summary.diag_mean.assign(kernel.output_dim(), 0.0);
      break;
    }
    default: {
      summary.u = pair_sum(data, kernel, options.threads);
      for (auto& x : summary.u) x *= 2.0 / (nf * (nf - 1.0));
      summary.diag_mean = diag_kernel_mean(data, kernel);
      break;
    }
  }

  summary.v.resize(summary.u.size());
  for (std::size_t m = 0; m < summary.u.size(); ++m)
    summary.v[m] = ((nf - 1.0) * summary.u[m] + summary.diag_mean[m]) / nf;
  return summary;
}

HajekTable compute_hajek(const DataMatrix& data, const KernelSpec& kernel,
                         const ComputeOptions& options) {
  check_kernel(data, kernel);
  const std::size_t n = data.n();
  if (n < 3)
    throw std::invalid_argument("projection table needs n >= 3");
  const std::size_t d = kernel.output_dim();
  const double nf = static_cast<double>(n);

  const auto summary = compute_ustat(data, kernel, options);
  HajekTable table{Matrix(n, d), summary.u, n, d};

  switch (kernel.kind()) {
    case KernelKind::Mean: {
      TreeVectorSum sum(d);
      for (std::size_t i = 0; i < n; ++i) sum.add(data.row(i));
      const auto s = sum.total();
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        auto out = table.ghat.row(i);
        for (std::size_t m = 0; m < d; ++m)
          out[m] = 0.5 * ((nf - 2.0) * row[m] + s[m]) / (nf - 1.0) - summary.u[m];
      }
      break;
    }
    case KernelKind::Covariance: {
      const std::size_t p = data.p();
      TreeVectorSum sum_x(p);
      TreeVectorSum sum_q(d);
      for (std::size_t i = 0; i < n; ++i) {
        sum_x.add(data.row(i));
        sum_q.add(flatten_outer(data.row(i)));
      }
      const auto s = sum_x.total();
      const auto q = sum_q.total();
      parallel_for(n, options.threads, [&](std::size_t i) {
        const auto x = data.row(i);
        auto out = table.ghat.row(i);
        std::size_t j = 0;
        for (std::size_t m = 0; m < p; ++m) {
          const double sm = s[m] - x[m];
          for (std::size_t k = m; k < p; ++k) {
            const double sk = s[k] - x[k];
            // sum_{j != i} h(x_i, x_j) expanded in first and second moments
            const double row_sum =
                0.5 * ((nf - 1.0) * x[m] * x[k] - x[m] * sk - sm * x[k] +
                       (q[j] - x[m] * x[k]));
            out[j] = row_sum / (nf - 1.0) - summary.u[j];
            ++j;
          }
        }
      });
      break;
    }
    default: {
      parallel_for(n, options.threads, [&](std::size_t i) {
        TreeVectorSum acc(d);
        std::vector<double> h(d);
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          kernel.eval(data.row(i), data.row(j), h);
          acc.add(h);
        }
        const auto row_sum = acc.total();
        auto out = table.ghat.row(i);
        for (std::size_t m = 0; m < d; ++m)
          out[m] = row_sum[m] / (nf - 1.0) - summary.u[m];
      });
      break;
    }
  }
  return table;
}

CovEstimate multiplier_cov(const HajekTable& hajek, const ComputeOptions& options) {
  check_dense_limit(hajek.d, options);
  return {scaled_gram(hajek.ghat, 1.0 / static_cast<double>(hajek.n), options.threads),
          CovKind::Multiplier};
}

std::vector<double> multiplier_cov_diagonal(const HajekTable& hajek) {
  std::vector<double> diag(hajek.d);
  std::vector<double> prod(hajek.n);
  for (std::size_t m = 0; m < hajek.d; ++m) {
    for (std::size_t i = 0; i < hajek.n; ++i) {
      const double g = hajek.ghat(i, m);
      prod[i] = g * g;
    }
    diag[m] = pairwise_sum(prod) / static_cast<double>(hajek.n);
  }
  return diag;
}

CovEstimate jackknife_cov(const HajekTable& hajek, const ComputeOptions& options) {
  if (hajek.n < 3)
    throw std::invalid_argument("jackknife covariance needs n >= 3");
  auto est = multiplier_cov(hajek, options);
  const double nf = static_cast<double>(hajek.n);
  const double scale = nf * (nf - 1.0) / ((nf - 2.0) * (nf - 2.0));
  for (auto& x : est.matrix.values()) x *= scale;
  est.kind = CovKind::Jackknife;
  return est;
}

namespace {

// Rows G_i = n^{-1} sum_j h(X_i, X_j), including j = i.
Matrix eb_projection_rows(const DataMatrix& data, const KernelSpec& kernel,
                          unsigned threads) {
  const std::size_t n = data.n();
  const std::size_t d = kernel.output_dim();
  Matrix rows(n, d);
  parallel_for(n, threads, [&](std::size_t i) {
    TreeVectorSum acc(d);
    std::vector<double> h(d);
    for (std::size_t j = 0; j < n; ++j) {
      kernel.eval(data.row(i), data.row(j), h);
      acc.add(h);
    }
    const auto total = acc.total();
    auto out = rows.row(i);
    for (std::size_t m = 0; m < d; ++m) out[m] = total[m] / static_cast<double>(n);
  });
  return rows;
}

}  // namespace

CovEstimate eb_cov(const DataMatrix& data, const KernelSpec& kernel,
                   const ComputeOptions& options) {
  check_kernel(data, kernel);
  const std::size_t d = kernel.output_dim();
  check_dense_limit(d, options);
  const std::size_t n = data.n();

  const Matrix rows = eb_projection_rows(data, kernel, options.threads);
  TreeVectorSum acc(d);
  for (std::size_t i = 0; i < n; ++i) acc.add(rows.row(i));
  auto v = acc.total();
  for (auto& x : v) x /= static_cast<double>(n);

  Matrix gamma = scaled_gram(rows, 1.0 / static_cast<double>(n), options.threads);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) gamma(a, b) -= v[a] * v[b];
  return {std::move(gamma), CovKind::EmpiricalBootstrap};
}

std::vector<double> eb_cov_diagonal(const DataMatrix& data, const KernelSpec& kernel,
                                    const ComputeOptions& options) {
  check_kernel(data, kernel);
  const std::size_t n = data.n();
  const std::size_t d = kernel.output_dim();
  const Matrix rows = eb_projection_rows(data, kernel, options.threads);

  TreeVectorSum acc(d);
  for (std::size_t i = 0; i < n; ++i) acc.add(rows.row(i));
  auto v = acc.total();
  for (auto& x : v) x /= static_cast<double>(n);

  std::vector<double> diag(d);
  std::vector<double> prod(n);
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t i = 0; i < n; ++i) prod[i] = rows(i, m) * rows(i, m);
    diag[m] = pairwise_sum(prod) / static_cast<double>(n) - v[m] * v[m];
  }
  return diag;
}

std::vector<double> split_sum(const DataMatrix& data, const KernelSpec& kernel) {
  check_kernel(data, kernel);
  const std::size_t m = data.n() / 2;
  const std::size_t d = kernel.output_dim();
  TreeVectorSum acc(d);
  std::vector<double> h(d);
  for (std::size_t i = 0; i < m; ++i) {
    kernel.eval(data.row(i), data.row(i + m), h);
    acc.add(h);
  }
  auto total = acc.total();
  for (auto& x : total) x /= static_cast<double>(m);
  return total;
}

const std::vector<std::string>& fast_path_names() {
  static const std::vector<std::string> names = {
      "ustat.mean",          "ustat.cov",
      "hajek.mean",          "hajek.cov",
      "empirical_draw.mean", "empirical_draw.cov",
      "reweighted_draw.mean", "reweighted_draw.cov",
  };
  return names;
}

}  // namespace ustatboot
