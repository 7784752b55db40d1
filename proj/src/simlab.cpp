#include "ustatboot/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ustatboot/applications.hpp"
#include "ustatboot/errors.hpp"
#include "ustatboot/parallel.hpp"
#include "ustatboot/ustat.hpp"

namespace ustatboot {

namespace {

// stream-family tags for nested seed derivation
constexpr std::uint64_t kTagReference = 1;
constexpr std::uint64_t kTagSanity = 2;
constexpr std::uint64_t kTagSizeData = 3;
constexpr std::uint64_t kTagSizeBoot = 4;

}  // namespace

ModelKind parse_model(std::string_view name) {
  if (name == "m1") return ModelKind::ContaminatedNormal;
  if (name == "m2") return ModelKind::EllipticalT;
  if (name == "block") return ModelKind::BlockDiag;
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected m1, m2 or block)");
}

DepKind parse_dep(std::string_view name) {
  if (name == "d1") return DepKind::Strong;
  if (name == "d2") return DepKind::Ar07;
  if (name == "d3") return DepKind::Ar03;
  throw std::invalid_argument("unknown dependence '" + std::string(name) +
                              "' (expected d1, d2 or d3)");
}

const char* model_name(ModelKind model) {
  switch (model) {
    case ModelKind::ContaminatedNormal: return "m1";
    case ModelKind::EllipticalT: return "m2";
    case ModelKind::BlockDiag: return "block";
  }
  return "unknown";
}

const char* dep_name(DepKind dep) {
  switch (dep) {
    case DepKind::Strong: return "d1";
    case DepKind::Ar07: return "d2";
    case DepKind::Ar03: return "d3";
    case DepKind::Custom: return "custom";
  }
  return "unknown";
}

void validate_config(const SimConfig& config) {
  if (config.p < 1) throw std::invalid_argument("sim config: p must be >= 1");
  if (config.n < 2) throw std::invalid_argument("sim config: n must be >= 2");
  if (config.reps < 1) throw std::invalid_argument("sim config: reps must be >= 1");
  switch (config.model) {
    case ModelKind::ContaminatedNormal:
      if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
        throw std::invalid_argument("sim config: epsilon must lie in (0,1)");
      if (!(config.nu > 0.0))
        throw std::invalid_argument("sim config: nu must be positive");
      break;
    case ModelKind::EllipticalT:
      if (!(config.nu > 4.0))
        throw std::invalid_argument(
            "sim config: the t model needs nu > 4 for a finite kurtosis");
      break;
    case ModelKind::BlockDiag:
      if (config.blocks < 1 || config.block_size < 1 ||
          config.blocks * config.block_size != config.p)
        throw std::invalid_argument("sim config: block design needs p = L * m");
      break;
  }
  if (config.dep == DepKind::Custom &&
      (config.custom_v.rows() != config.p || config.custom_v.cols() != config.p))
    throw std::invalid_argument("sim config: custom dependence matrix must be p x p");
}

Matrix build_dependence(DepKind dep, std::size_t p, const Matrix* custom) {
  switch (dep) {
    case DepKind::Strong: {
      Matrix v(p, p, 0.9);
      for (std::size_t i = 0; i < p; ++i) v(i, i) = 1.0;
      return v;
    }
    case DepKind::Ar07:
    case DepKind::Ar03: {
      const double rho = dep == DepKind::Ar07 ? 0.7 : 0.3;
      Matrix v(p, p);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
          v(i, j) = std::pow(rho, std::abs(static_cast<double>(i) -
                                           static_cast<double>(j)));
      return v;
    }
    case DepKind::Custom:
      if (custom == nullptr)
        throw std::invalid_argument("build_dependence: custom matrix missing");
      return *custom;
  }
  throw std::logic_error("build_dependence: unreachable");
}

Matrix gaussian_factor(const Matrix& v) {
  try {
    return cholesky_psd(v);
  } catch (const numerical_error&) {
    double diag_scale = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) diag_scale += std::abs(v(i, i));
    diag_scale = v.rows() > 0 ? diag_scale / static_cast<double>(v.rows()) : 1.0;
    Matrix jittered = v;
    for (std::size_t i = 0; i < v.rows(); ++i)
      jittered(i, i) += 1e-10 * std::max(diag_scale, 1.0);
    try {
      return cholesky_psd(jittered);
    } catch (const numerical_error&) {
      throw numerical_error("scale matrix is not positive definite, even after jitter");
    }
  }
}

Matrix sample_gaussian(const Matrix& factor, std::size_t count, CounterRng& rng) {
  const std::size_t p = factor.rows();
  Matrix out(count, p);
  std::vector<double> z(p);
  for (std::size_t r = 0; r < count; ++r) {
    rng.fill_normal(z);
    auto row = out.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += factor(i, j) * z[j];
      row[i] = s;
    }
  }
  return out;
}

DataMatrix sample_model(const SimConfig& config, std::size_t count,
                        std::uint64_t stream) {
  validate_config(config);
  CounterRng rng(config.seed, stream);
  const std::size_t p = config.p;

  if (config.model == ModelKind::BlockDiag) {
    Matrix out(count, p);
    for (std::size_t r = 0; r < count; ++r) {
      auto row = out.row(r);
      for (std::size_t l = 0; l < config.blocks; ++l) {
        const double z = rng.next_normal();
        for (std::size_t k = 0; k < config.block_size; ++k)
          row[l * config.block_size + k] = z;
      }
    }
    return DataMatrix(std::move(out));
  }

  const Matrix v = build_dependence(config.dep, p, &config.custom_v);
  const Matrix factor = gaussian_factor(v);
  Matrix out(count, p);
  std::vector<double> z(p);
  for (std::size_t r = 0; r < count; ++r) {
    rng.fill_normal(z);
    auto row = out.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += factor(i, j) * z[j];
      row[i] = s;
    }
    if (config.model == ModelKind::ContaminatedNormal) {
      if (rng.next_uniform() < config.epsilon)
        for (std::size_t i = 0; i < p; ++i) row[i] *= config.nu;
    } else {
      const double w = rng.next_chi_squared(config.nu);
      const double scale = 1.0 / std::sqrt(w / config.nu);
      for (std::size_t i = 0; i < p; ++i) row[i] *= scale;
    }
  }
  return DataMatrix(std::move(out));
}

double model_variance_scale(const SimConfig& config) {
  switch (config.model) {
    case ModelKind::ContaminatedNormal:
      return (1.0 - config.epsilon) + config.epsilon * config.nu * config.nu;
    case ModelKind::EllipticalT:
      return config.nu / (config.nu - 2.0);
    case ModelKind::BlockDiag:
      return 1.0;
  }
  throw std::logic_error("model_variance_scale: unreachable");
}

double model_kurtosis(const SimConfig& config) {
  switch (config.model) {
    case ModelKind::ContaminatedNormal: {
      const double e = config.epsilon;
      const double nu2 = config.nu * config.nu;
      const double num = 1.0 + e * (nu2 * nu2 - 1.0);
      const double den = 1.0 + e * (nu2 - 1.0);
      return num / (den * den) - 1.0;
    }
    case ModelKind::EllipticalT:
      if (!(config.nu > 4.0))
        throw std::invalid_argument("kurtosis of the t model needs nu > 4");
      return 2.0 / (config.nu - 4.0);
    case ModelKind::BlockDiag:
      return 0.0;
  }
  throw std::logic_error("model_kurtosis: unreachable");
}

double GammaModel::entry(std::size_t j, std::size_t k, std::size_t m,
                         std::size_t l) const {
  const double jk = sigma(j, k), ml = sigma(m, l);
  const double jm = sigma(j, m), kl = sigma(k, l);
  const double jl = sigma(j, l), km = sigma(k, m);
  return (kurtosis * (jk * ml + jm * kl + jl * km) + jm * kl + jl * km) / 4.0;
}

Matrix GammaModel::materialize(std::size_t dense_limit) const {
  const TriIndex idx(sigma.rows());
  const std::size_t d = idx.dim();
  if (d > dense_limit)
    throw resource_limit_error("projection covariance of dimension " +
                               std::to_string(d) + " exceeds the dense limit " +
                               std::to_string(dense_limit));
  Matrix gamma(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    const auto [j, k] = idx.unflat(a);
    for (std::size_t b = a; b < d; ++b) {
      const auto [m, l] = idx.unflat(b);
      const double value = entry(j, k, m, l);
      gamma(a, b) = value;
      gamma(b, a) = value;
    }
  }
  return gamma;
}

GammaModel make_gamma_model(const SimConfig& config) {
  validate_config(config);
  GammaModel model;
  model.kurtosis = model_kurtosis(config);
  if (config.model == ModelKind::BlockDiag) {
    Matrix sigma(config.p, config.p);
    for (std::size_t l = 0; l < config.blocks; ++l)
      for (std::size_t a = 0; a < config.block_size; ++a)
        for (std::size_t b = 0; b < config.block_size; ++b)
          sigma(l * config.block_size + a, l * config.block_size + b) = 1.0;
    model.sigma = std::move(sigma);
    return model;
  }
  const double scale = model_variance_scale(config);
  model.sigma = build_dependence(config.dep, config.p, &config.custom_v);
  for (auto& x : model.sigma.values()) x *= scale;
  return model;
}

GaussianReference make_gaussian_reference(const Matrix& gamma,
                                          std::size_t dense_limit) {
  if (gamma.rows() != gamma.cols())
    throw std::invalid_argument("gaussian reference: covariance must be square");
  if (gamma.rows() > dense_limit)
    throw resource_limit_error("gaussian reference dimension " +
                               std::to_string(gamma.rows()) +
                               " exceeds the dense limit " +
                               std::to_string(dense_limit));
  return {gaussian_factor(gamma)};
}

Matrix sample_reference_rows(const GaussianReference& ref, std::size_t count,
                             std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  return sample_gaussian(ref.factor, count, rng);
}

MaxReductions sample_reference_reductions(const GaussianReference& ref,
                                          std::size_t count, std::uint64_t seed,
                                          std::uint64_t stream, unsigned threads) {
  const std::size_t d = ref.factor.rows();
  MaxReductions red{std::vector<double>(count), std::vector<double>(count)};
  parallel_for(count, threads, [&](std::size_t r) {
    CounterRng rng(seed, stream + r);
    std::vector<double> z(d);
    rng.fill_normal(z);
    double vmax = -std::numeric_limits<double>::infinity();
    double amax = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += ref.factor(i, j) * z[j];
      vmax = std::max(vmax, s);
      amax = std::max(amax, std::abs(s));
    }
    red.max[r] = vmax;
    red.abs_max[r] = amax;
  });
  return red;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
  }
  return sup;
}

namespace {

std::vector<double> cdf_grid(double lo, double hi, std::size_t points) {
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
  return grid;
}

std::vector<double> cdf_at(const std::vector<double>& sorted,
                           const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), grid[i]);
    out[i] = static_cast<double>(it - sorted.begin()) /
             static_cast<double>(sorted.size());
  }
  return out;
}

void fill_curves(const std::vector<double>& t, const std::vector<double>& y,
                 std::size_t points, std::vector<double>& grid,
                 std::vector<double>& cdf_t, std::vector<double>& cdf_y) {
  std::vector<double> ts(t), ys(y);
  std::sort(ts.begin(), ts.end());
  std::sort(ys.begin(), ys.end());
  const double lo = std::min(ts.front(), ys.front());
  const double hi = std::max(ts.back(), ys.back());
  grid = cdf_grid(lo, hi, points);
  cdf_t = cdf_at(ts, grid);
  cdf_y = cdf_at(ys, grid);
}

}  // namespace

CellSummary run_gaussian_approx_cell(const SimConfig& config,
                                     const ExperimentOptions& options) {
  validate_config(config);
  const std::size_t R = config.reps;
  const KernelSpec kernel = KernelSpec::covariance(config.p);
  const GammaModel gamma = make_gamma_model(config);
  const std::vector<double> theta = flatten_symmetric(gamma.sigma);
  const double stat_scale = 0.5 * std::sqrt(static_cast<double>(config.n));

  CellSummary cell;
  cell.config = config;

  const GaussianReference ref =
      make_gaussian_reference(gamma.materialize(options.dense_limit), options.dense_limit);
  auto y_red = sample_reference_reductions(ref, R, derive_seed(config.seed, kTagReference, 0),
                                           0, options.threads);
  cell.y_max = std::move(y_red.max);
  cell.y_abs_max = std::move(y_red.abs_max);

  if (options.sanity_mode) {
    auto t_red = sample_reference_reductions(ref, R, derive_seed(config.seed, kTagSanity, 0),
                                             0, options.threads);
    cell.t_max = std::move(t_red.max);
    cell.t_abs_max = std::move(t_red.abs_max);
  } else {
    cell.t_max.resize(R);
    cell.t_abs_max.resize(R);
    parallel_for(R, options.threads, [&](std::size_t r) {
      const DataMatrix data = sample_model(config, config.n, r);
      ComputeOptions copts;
      copts.threads = 1;
      const auto summary = compute_ustat(data, kernel, copts);
      double vmax = -std::numeric_limits<double>::infinity();
      double amax = 0.0;
      for (std::size_t m = 0; m < summary.u.size(); ++m) {
        const double t = stat_scale * (summary.u[m] - theta[m]);
        vmax = std::max(vmax, t);
        amax = std::max(amax, std::abs(t));
      }
      cell.t_max[r] = vmax;
      cell.t_abs_max[r] = amax;
    });
  }

  cell.ks_max = ks_distance(cell.t_max, cell.y_max);
  cell.ks_abs_max = ks_distance(cell.t_abs_max, cell.y_abs_max);
  fill_curves(cell.t_max, cell.y_max, options.grid_points, cell.grid_max,
              cell.cdf_t_max, cell.cdf_y_max);
  fill_curves(cell.t_abs_max, cell.y_abs_max, options.grid_points, cell.grid_abs_max,
              cell.cdf_t_abs_max, cell.cdf_y_abs_max);

  if (options.include_size_experiment) {
    std::size_t rejected = 0;
    std::vector<char> reject(options.size_reps, 0);
    parallel_for(options.size_reps, options.threads, [&](std::size_t r) {
      SimConfig rep_config = config;
      rep_config.seed = derive_seed(config.seed, kTagSizeData, r);
      const DataMatrix data = sample_model(rep_config, config.n, 0);
      RunOptions ropts;
      ropts.threads = 1;
      const auto outcome =
          simultaneous_cov_test(data, gamma.sigma, options.size_alpha, options.size_B,
                                derive_seed(config.seed, kTagSizeBoot, r), ropts);
      reject[r] = outcome.reject ? 1 : 0;
    });
    for (const char x : reject) rejected += static_cast<std::size_t>(x);
    cell.cov_test_rejection_rate =
        static_cast<double>(rejected) / static_cast<double>(options.size_reps);
  }
  return cell;
}

namespace {

void write_draw_file(const std::filesystem::path& path, const std::vector<double>& t,
                     const std::vector<double>& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "rep,t_bar,y_bar\n";
  char buf[128];
  for (std::size_t r = 0; r < t.size(); ++r) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", r + 1, t[r], y[r]);
    out << buf;
  }
}

void write_cdf_file(const std::filesystem::path& path, const std::vector<double>& grid,
                    const std::vector<double>& cdf_t, const std::vector<double>& cdf_y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "grid,cdf_t,cdf_y\n";
  char buf[160];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", grid[i], cdf_t[i], cdf_y[i]);
    out << buf;
  }
}

}  // namespace

void write_cell_csv(const CellSummary& cell, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_draw_file(dir / "draws_max.csv", cell.t_max, cell.y_max);
  write_draw_file(dir / "draws_absmax.csv", cell.t_abs_max, cell.y_abs_max);
  write_cdf_file(dir / "cdf_max.csv", cell.grid_max, cell.cdf_t_max, cell.cdf_y_max);
  write_cdf_file(dir / "cdf_absmax.csv", cell.grid_abs_max, cell.cdf_t_abs_max,
                 cell.cdf_y_abs_max);
}

double test_size_experiment(SizeTestKind kind, const Matrix& v, std::size_t n,
                            const Matrix& null_matrix, double alpha, std::size_t B,
                            std::size_t R, std::uint64_t seed, unsigned threads) {
  const Matrix factor = gaussian_factor(v);
  std::vector<char> reject(R, 0);
  parallel_for(R, threads, [&](std::size_t r) {
    CounterRng rng(derive_seed(seed, kTagSizeData, r), 0);
    DataMatrix data(sample_gaussian(factor, n, rng));
    RunOptions ropts;
    ropts.threads = 1;
    const std::uint64_t boot_seed = derive_seed(seed, kTagSizeBoot, r);
    const TestOutcome outcome =
        kind == SizeTestKind::Covariance
            ? simultaneous_cov_test(data, null_matrix, alpha, B, boot_seed, ropts)
            : kendall_test(data, null_matrix, alpha, B, boot_seed, ropts);
    reject[r] = outcome.reject ? 1 : 0;
  });
  std::size_t rejected = 0;
  for (const char x : reject) rejected += static_cast<std::size_t>(x);
  return static_cast<double>(rejected) / static_cast<double>(R);
}

}  // namespace ustatboot
