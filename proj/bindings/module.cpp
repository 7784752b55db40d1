// Python bindings for the core operations: kernel summaries, bootstrap
// replication, thresholding, simultaneous tests and the simulation lab.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ustatboot/applications.hpp"
#include "ustatboot/bootstrap.hpp"
#include "ustatboot/report.hpp"
#include "ustatboot/simlab.hpp"
#include "ustatboot/ustat.hpp"

namespace py = pybind11;
using namespace ustatboot;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  const auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
  return m;
}

py::array_t<double> from_matrix(const Matrix& m) {
  py::array_t<double> a({m.rows(), m.cols()});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
  return a;
}

py::array_t<double> from_vector(const std::vector<double>& v) {
  py::array_t<double> a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  auto w = a.mutable_unchecked<1>();
  for (std::size_t i = 0; i < v.size(); ++i)
    w(static_cast<py::ssize_t>(i)) = v[i];
  return a;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  const auto r = a.unchecked<1>();
  std::vector<double> v(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) v[static_cast<std::size_t>(i)] = r(i);
  return v;
}

using Array2 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Array1 = py::array_t<double, py::array::c_style | py::array::forcecast>;

StatFunctional functional_from(const std::string& stat, const std::string& scale) {
  StatScale s;
  if (scale == "raw")
    s = StatScale::Raw;
  else if (scale == "rescaled")
    s = StatScale::Rescaled;
  else
    throw std::invalid_argument("scale must be 'raw' or 'rescaled'");
  if (stat == "max") return StatFunctional::max(s);
  if (stat == "absmax") return StatFunctional::abs_max(s);
  if (stat == "offabsmax") return StatFunctional::off_diag_abs_max(s);
  throw std::invalid_argument("stat must be 'max', 'absmax' or 'offabsmax'");
}

SimConfig config_from(const std::string& model, const std::string& dep, std::size_t n,
                      std::size_t p, std::size_t reps, std::uint64_t seed,
                      double epsilon, double nu, std::size_t blocks,
                      std::size_t block_size) {
  SimConfig config;
  config.model = parse_model(model);
  config.dep = parse_dep(dep);
  config.n = n;
  config.p = p;
  config.reps = reps;
  config.seed = seed;
  config.epsilon = epsilon;
  config.nu = nu != 0.0 ? nu : (config.model == ModelKind::EllipticalT ? 10.0 : 1.5);
  config.blocks = blocks;
  config.block_size = block_size;
  validate_config(config);
  return config;
}

py::dict outcome_dict(const TestOutcome& outcome) {
  py::dict d;
  d["statistic"] = outcome.statistic;
  d["critical"] = outcome.critical;
  d["reject"] = outcome.reject;
  d["pvalue"] = outcome.pvalue;
  d["alpha"] = outcome.alpha;
  d["B"] = outcome.B;
  d["seed"] = outcome.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ustatboot, m) {
  m.doc() = "high-dimensional pairwise-kernel statistics with bootstrap inference";
  m.attr("__version__") = kArtifactVersion;

  m.def(
      "ustat",
      [](const Array2& data, const std::string& kernel_name, unsigned threads) {
        const DataMatrix data_m(to_matrix(data));
        const KernelSpec kernel = parse_kernel(kernel_name, data_m.p());
        ComputeOptions opts;
        opts.threads = threads;
        const auto s = compute_ustat(data_m, kernel, opts);
        py::dict out;
        out["u"] = from_vector(s.u);
        out["v"] = from_vector(s.v);
        out["n"] = s.n;
        out["p"] = data_m.p();
        out["d"] = kernel.output_dim();
        out["kernel"] = std::string(kernel.name());
        if (kernel.matrix_structured())
          out["matrix"] = from_matrix(unflatten_symmetric(s.u, data_m.p()));
        return out;
      },
      py::arg("data"), py::arg("kernel") = "cov", py::arg("threads") = 0,
      "U- and V-statistic of the chosen pairwise kernel");

  m.def(
      "hajek",
      [](const Array2& data, const std::string& kernel_name, unsigned threads) {
        const DataMatrix data_m(to_matrix(data));
        const KernelSpec kernel = parse_kernel(kernel_name, data_m.p());
        ComputeOptions opts;
        opts.threads = threads;
        const auto table = compute_hajek(data_m, kernel, opts);
        py::dict out;
        out["ghat"] = from_matrix(table.ghat);
        out["u"] = from_vector(table.u);
        return out;
      },
      py::arg("data"), py::arg("kernel") = "cov", py::arg("threads") = 0,
      "per-observation projection estimates and the u-statistic");

  m.def(
      "multiplier_cov",
      [](const Array2& data, const std::string& kernel_name, std::size_t dense_limit) {
        const DataMatrix data_m(to_matrix(data));
        const KernelSpec kernel = parse_kernel(kernel_name, data_m.p());
        ComputeOptions opts;
        opts.dense_dim_limit = dense_limit;
        return from_matrix(multiplier_cov(compute_hajek(data_m, kernel, opts), opts).matrix);
      },
      py::arg("data"), py::arg("kernel") = "cov", py::arg("dense_limit") = 4096);

  m.def(
      "eb_cov",
      [](const Array2& data, const std::string& kernel_name, std::size_t dense_limit) {
        const DataMatrix data_m(to_matrix(data));
        const KernelSpec kernel = parse_kernel(kernel_name, data_m.p());
        ComputeOptions opts;
        opts.dense_dim_limit = dense_limit;
        return from_matrix(eb_cov(data_m, kernel, opts).matrix);
      },
      py::arg("data"), py::arg("kernel") = "cov", py::arg("dense_limit") = 4096);

  m.def(
      "split_sum",
      [](const Array2& data, const std::string& kernel_name) {
        const DataMatrix data_m(to_matrix(data));
        return from_vector(split_sum(data_m, parse_kernel(kernel_name, data_m.p())));
      },
      py::arg("data"), py::arg("kernel") = "cov",
      "half-sample estimate of the kernel mean");

  m.def(
      "run_bootstrap",
      [](const Array2& data, const std::string& kernel_name, const std::string& method,
         const std::string& stat, const std::string& scale, std::size_t B,
         std::uint64_t seed, unsigned threads) {
        const DataMatrix data_m(to_matrix(data));
        const KernelSpec kernel = parse_kernel(kernel_name, data_m.p());
        RunOptions opts;
        opts.threads = threads;
        const auto draws = run_bootstrap(data_m, kernel, parse_method(method),
                                         functional_from(stat, scale), B, seed, opts);
        return from_vector(draws.values);
      },
      py::arg("data"), py::arg("kernel") = "cov", py::arg("method") = "mult",
      py::arg("stat") = "absmax", py::arg("scale") = "raw", py::arg("B") = 1000,
      py::arg("seed") = 0, py::arg("threads") = 0,
      "replicate values of the chosen scalar functional");

  m.def(
      "quantile",
      [](const Array1& values, double alpha) {
        BootstrapDraws draws;
        draws.values = to_vector(values);
        draws.B = draws.values.size();
        return quantile(draws, alpha).value;
      },
      py::arg("values"), py::arg("alpha"),
      "order-statistic quantile (the ceil(alpha*B)-th smallest value)");

  m.def(
      "threshold_matrix",
      [](const Array2& s, double tau, bool keep_diag) {
        return from_matrix(threshold_matrix(to_matrix(s), tau, keep_diag));
      },
      py::arg("s"), py::arg("tau"), py::arg("keep_diag") = false);

  m.def(
      "select_threshold",
      [](const Array2& data, double alpha, double beta, std::size_t B,
         std::uint64_t seed, bool keep_diag, unsigned threads) {
        ThresholdOptions opts;
        opts.keep_diagonal = keep_diag;
        opts.run.threads = threads;
        const auto result =
            select_threshold(DataMatrix(to_matrix(data)), alpha, beta, B, seed, opts);
        py::dict out;
        out["tau_star"] = result.tau_star;
        out["alpha"] = result.alpha;
        out["beta"] = result.beta;
        out["thresholded"] = from_matrix(result.thresholded);
        out["B"] = result.B;
        out["seed"] = result.seed;
        return out;
      },
      py::arg("data"), py::arg("alpha") = 0.05, py::arg("beta") = 1.0,
      py::arg("B") = 1000, py::arg("seed") = 0, py::arg("keep_diag") = false,
      py::arg("threads") = 0, "bootstrap-selected hard threshold");

  m.def(
      "matrix_norms",
      [](const Array2& a) {
        const auto norms = matrix_norms(to_matrix(a));
        py::dict out;
        out["sup"] = norms.sup;
        out["off_sup"] = norms.off_sup;
        out["frobenius"] = norms.frobenius;
        out["spectral"] = norms.spectral;
        out["l1"] = norms.l1;
        return out;
      },
      py::arg("a"));

  m.def(
      "cov_test",
      [](const Array2& data, const Array2& sigma0, double alpha, std::size_t B,
         std::uint64_t seed, unsigned threads) {
        RunOptions opts;
        opts.threads = threads;
        return outcome_dict(simultaneous_cov_test(DataMatrix(to_matrix(data)),
                                                  to_matrix(sigma0), alpha, B, seed,
                                                  opts));
      },
      py::arg("data"), py::arg("sigma0"), py::arg("alpha") = 0.05,
      py::arg("B") = 1000, py::arg("seed") = 0, py::arg("threads") = 0);

  m.def(
      "kendall_test",
      [](const Array2& data, const Array2& tau0, double alpha, std::size_t B,
         std::uint64_t seed, unsigned threads) {
        RunOptions opts;
        opts.threads = threads;
        return outcome_dict(kendall_test(DataMatrix(to_matrix(data)), to_matrix(tau0),
                                         alpha, B, seed, opts));
      },
      py::arg("data"), py::arg("tau0"), py::arg("alpha") = 0.05, py::arg("B") = 1000,
      py::arg("seed") = 0, py::arg("threads") = 0);

  m.def(
      "build_dependence",
      [](const std::string& dep, std::size_t p) {
        return from_matrix(build_dependence(parse_dep(dep), p));
      },
      py::arg("dep"), py::arg("p"));

  m.def(
      "sample_model",
      [](const std::string& model, const std::string& dep, std::size_t n, std::size_t p,
         std::uint64_t seed, double epsilon, double nu, std::size_t L, std::size_t m_,
         std::uint64_t stream) {
        const SimConfig config = config_from(model, dep, n, p, 1, seed, epsilon, nu, L, m_);
        return from_matrix(sample_model(config, n, stream).values());
      },
      py::arg("model"), py::arg("dep") = "d2", py::arg("n") = 500, py::arg("p") = 40,
      py::arg("seed") = 0, py::arg("epsilon") = 0.2, py::arg("nu") = 0.0,
      py::arg("L") = 0, py::arg("m") = 0, py::arg("stream") = 0);

  m.def(
      "gamma_model",
      [](const std::string& model, const std::string& dep, std::size_t p, double epsilon,
         double nu, std::size_t L, std::size_t m_) {
        const auto gm =
            make_gamma_model(config_from(model, dep, 2, p, 1, 0, epsilon, nu, L, m_));
        py::dict out;
        out["kurtosis"] = gm.kurtosis;
        out["sigma"] = from_matrix(gm.sigma);
        return out;
      },
      py::arg("model"), py::arg("dep") = "d2", py::arg("p") = 40,
      py::arg("epsilon") = 0.2, py::arg("nu") = 0.0, py::arg("L") = 0, py::arg("m") = 0,
      "kurtosis parameter and covariance of the elliptical projection law");

  m.def(
      "gamma_entry",
      [](double kurtosis, const Array2& sigma, std::size_t j, std::size_t k,
         std::size_t mm, std::size_t l) {
        const GammaModel gm{kurtosis, to_matrix(sigma)};
        return gm.entry(j, k, mm, l);
      },
      py::arg("kurtosis"), py::arg("sigma"), py::arg("j"), py::arg("k"), py::arg("m"),
      py::arg("l"));

  m.def(
      "ks_distance",
      [](const Array1& a, const Array1& b) {
        return ks_distance(to_vector(a), to_vector(b));
      },
      py::arg("a"), py::arg("b"), "two-sample Kolmogorov-Smirnov statistic");

  m.def(
      "run_cell",
      [](const std::string& model, const std::string& dep, std::size_t n, std::size_t p,
         std::size_t reps, std::uint64_t seed, double epsilon, double nu, std::size_t L,
         std::size_t m_, unsigned threads, bool sanity) {
        const SimConfig config =
            config_from(model, dep, n, p, reps, seed, epsilon, nu, L, m_);
        ExperimentOptions opts;
        opts.threads = threads;
        opts.sanity_mode = sanity;
        const auto cell = run_gaussian_approx_cell(config, opts);
        py::dict out;
        out["ks"] = cell.ks_max;
        out["ks_absmax"] = cell.ks_abs_max;
        out["t_max"] = from_vector(cell.t_max);
        out["t_absmax"] = from_vector(cell.t_abs_max);
        out["y_max"] = from_vector(cell.y_max);
        out["y_absmax"] = from_vector(cell.y_abs_max);
        return out;
      },
      py::arg("model"), py::arg("dep") = "d2", py::arg("n") = 500, py::arg("p") = 40,
      py::arg("reps") = 5000, py::arg("seed") = 0, py::arg("epsilon") = 0.2,
      py::arg("nu") = 0.0, py::arg("L") = 0, py::arg("m") = 0, py::arg("threads") = 0,
      py::arg("sanity") = false, "one cell of the gaussian-approximation study");
}
