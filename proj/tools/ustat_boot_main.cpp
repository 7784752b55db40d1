// ustat-boot: command-line front end for pairwise-kernel statistics,
// bootstrap quantiles, covariance thresholding, simultaneous tests and the
// simulation lab.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ustatboot/applications.hpp"
#include "ustatboot/bootstrap.hpp"
#include "ustatboot/csv.hpp"
#include "ustatboot/errors.hpp"
#include "ustatboot/report.hpp"
#include "ustatboot/simlab.hpp"
#include "ustatboot/ustat.hpp"

namespace {

using namespace ustatboot;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitResource = 4;

unsigned resolve_thread_flag(unsigned flag) {
  if (flag != 0) return flag;
  if (const char* env = std::getenv("USTAT_BOOT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;  // engine default: hardware concurrency
}

DataMatrix load_data(const std::string& path) {
  const auto table = read_csv(path);
  return DataMatrix(table.values);
}

Json vector_json(const std::vector<double>& values) { return Json::array_of(values); }

void emit(const Json& json) { std::cout << json.dump(2) << '\n'; }

void write_manifest_for(const std::string& command, Json parameters,
                        std::uint64_t seed, const std::vector<std::string>& inputs,
                        const std::string& path) {
  RunManifest manifest;
  manifest.command = command;
  manifest.parameters = std::move(parameters);
  manifest.seed = seed;
  for (const auto& input : inputs)
    manifest.input_digests.emplace_back(input, hash_file(input));
  write_manifest(manifest, path);
}

struct CommonFlags {
  unsigned threads = 0;
  std::string manifest_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags, const std::string& default_manifest) {
  cmd->add_option("--threads", flags.threads,
                  "worker threads (0 = hardware; USTAT_BOOT_THREADS overrides)");
  flags.manifest_path = default_manifest;
  cmd->add_option("--manifest", flags.manifest_path, "where to write the run manifest");
}

// ---------------------------------------------------------------- ustat ----

struct UstatArgs {
  std::string data_path;
  std::string kernel = "cov";
  std::string matrix_out;
  CommonFlags common;
};

int run_ustat(const UstatArgs& args) {
  const DataMatrix data = load_data(args.data_path);
  const KernelSpec kernel = parse_kernel(args.kernel, data.p());
  if (!args.matrix_out.empty() && !kernel.matrix_structured())
    throw std::invalid_argument("--matrix-out requires a matrix-structured kernel");
  ComputeOptions opts;
  opts.threads = resolve_thread_flag(args.common.threads);
  const auto summary = compute_ustat(data, kernel, opts);

  Json out = Json::object();
  out.set("n", data.n());
  out.set("p", data.p());
  out.set("d", kernel.output_dim());
  out.set("kernel", std::string(kernel.name()));
  out.set("u", vector_json(summary.u));
  out.set("v", vector_json(summary.v));
  emit(out);

  if (!args.matrix_out.empty())
    write_csv_file(args.matrix_out, unflatten_symmetric(summary.u, data.p()));

  Json params = Json::object();
  params.set("data", args.data_path);
  params.set("kernel", args.kernel);
  params.set("matrix_out", args.matrix_out);
  write_manifest_for("ustat", std::move(params), 0, {args.data_path},
                     args.common.manifest_path);
  return 0;
}

// ----------------------------------------------------------------- boot ----

struct BootArgs {
  std::string data_path;
  std::string kernel = "cov";
  std::string method = "mult";
  std::string stat = "absmax";
  std::string scale = "raw";
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  std::vector<double> alphas{0.95};
  std::string dump_draws;
  CommonFlags common;
};

StatFunctional parse_functional(const std::string& stat, const std::string& scale) {
  StatScale s;
  if (scale == "raw")
    s = StatScale::Raw;
  else if (scale == "rescaled")
    s = StatScale::Rescaled;
  else
    throw std::invalid_argument("unknown scale '" + scale + "' (raw or rescaled)");
  if (stat == "max") return StatFunctional::max(s);
  if (stat == "absmax") return StatFunctional::abs_max(s);
  if (stat == "offabsmax") return StatFunctional::off_diag_abs_max(s);
  throw std::invalid_argument("unknown stat '" + stat +
                              "' (max, absmax or offabsmax)");
}

int run_boot(const BootArgs& args) {
  const DataMatrix data = load_data(args.data_path);
  const KernelSpec kernel = parse_kernel(args.kernel, data.p());
  const BootstrapMethod method = parse_method(args.method);
  const StatFunctional functional = parse_functional(args.stat, args.scale);

  RunOptions opts;
  opts.threads = resolve_thread_flag(args.common.threads);
  const auto draws =
      run_bootstrap(data, kernel, method, functional, args.B, args.seed, opts);

  double sum = 0.0, sq = 0.0, lo = draws.values[0], hi = draws.values[0];
  for (const double v : draws.values) {
    sum += v;
    sq += v * v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double mean = sum / static_cast<double>(args.B);

  Json quantiles = Json::array();
  for (const double alpha : args.alphas) {
    const auto q = quantile(draws, alpha);
    Json entry = Json::object();
    entry.set("alpha", alpha);
    entry.set("value", q.value);
    quantiles.push(std::move(entry));
  }

  Json out = Json::object();
  out.set("n", data.n());
  out.set("p", data.p());
  out.set("d", kernel.output_dim());
  out.set("kernel", std::string(kernel.name()));
  out.set("method", args.method);
  out.set("stat", args.stat);
  out.set("scale", args.scale);
  out.set("B", args.B);
  out.set("seed", args.seed);
  out.set("quantiles", std::move(quantiles));
  Json stats = Json::object();
  stats.set("mean", mean);
  stats.set("sd", std::sqrt(std::max(0.0, sq / static_cast<double>(args.B) - mean * mean)));
  stats.set("min", lo);
  stats.set("max", hi);
  out.set("draws", std::move(stats));
  emit(out);

  if (!args.dump_draws.empty()) {
    std::ofstream dump(args.dump_draws);
    if (!dump) throw std::runtime_error("cannot write '" + args.dump_draws + "'");
    for (const double v : draws.values) dump << format_double(v) << '\n';
  }

  Json params = Json::object();
  params.set("data", args.data_path);
  params.set("kernel", args.kernel);
  params.set("method", args.method);
  params.set("stat", args.stat);
  params.set("scale", args.scale);
  params.set("B", args.B);
  Json alphas = Json::array();
  for (const double a : args.alphas) alphas.push(Json(a));
  params.set("alpha", std::move(alphas));
  params.set("dump_draws", args.dump_draws);
  write_manifest_for("boot", std::move(params), args.seed, {args.data_path},
                     args.common.manifest_path);
  return 0;
}

// ------------------------------------------------------------ threshold ----

struct ThresholdArgs {
  std::string data_path;
  double alpha = 0.05;
  double beta = 1.0;
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  bool keep_diag = false;
  std::string matrix_out = "thresholded.csv";
  CommonFlags common;
};

int run_threshold(const ThresholdArgs& args) {
  const DataMatrix data = load_data(args.data_path);
  ThresholdOptions opts;
  opts.keep_diagonal = args.keep_diag;
  opts.run.threads = resolve_thread_flag(args.common.threads);
  const auto result =
      select_threshold(data, args.alpha, args.beta, args.B, args.seed, opts);

  Json out = Json::object();
  out.set("tau_star", result.tau_star);
  out.set("alpha", result.alpha);
  out.set("beta", result.beta);
  out.set("B", result.B);
  out.set("seed", result.seed);
  out.set("p", data.p());
  out.set("n", data.n());
  out.set("keep_diag", args.keep_diag);
  out.set("matrix_out", args.matrix_out);
  emit(out);

  write_csv_file(args.matrix_out, result.thresholded);

  Json params = Json::object();
  params.set("data", args.data_path);
  params.set("alpha", args.alpha);
  params.set("beta", args.beta);
  params.set("B", args.B);
  params.set("keep_diag", args.keep_diag);
  params.set("matrix_out", args.matrix_out);
  write_manifest_for("threshold", std::move(params), args.seed, {args.data_path},
                     args.common.manifest_path);
  return 0;
}

// ----------------------------------------------------------------- test ----

struct TestArgs {
  std::string which;  // cov | kendall
  std::string data_path;
  std::string null_path;
  double alpha = 0.05;
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  CommonFlags common;
};

int run_test(const TestArgs& args) {
  const DataMatrix data = load_data(args.data_path);
  const auto null_table = read_csv(args.null_path);

  RunOptions opts;
  opts.threads = resolve_thread_flag(args.common.threads);
  const TestOutcome outcome =
      args.which == "cov"
          ? simultaneous_cov_test(data, null_table.values, args.alpha, args.B,
                                  args.seed, opts)
          : kendall_test(data, null_table.values, args.alpha, args.B, args.seed, opts);

  Json out = Json::object();
  out.set("test", args.which);
  out.set("statistic", outcome.statistic);
  out.set("critical", outcome.critical);
  out.set("reject", outcome.reject);
  out.set("pvalue", outcome.pvalue);
  out.set("alpha", outcome.alpha);
  out.set("B", outcome.B);
  out.set("seed", outcome.seed);
  emit(out);

  Json params = Json::object();
  params.set("test", args.which);
  params.set("data", args.data_path);
  params.set("null", args.null_path);
  params.set("alpha", args.alpha);
  params.set("B", args.B);
  write_manifest_for("test", std::move(params), args.seed,
                     {args.data_path, args.null_path}, args.common.manifest_path);
  return 0;
}

// ------------------------------------------------------------- simulate ----

struct SimulateArgs {
  std::string model = "m1";
  std::string dep = "d2";
  std::size_t n = 500;
  std::size_t p = 40;
  std::size_t reps = 5000;
  std::uint64_t seed = 0;
  std::string out_dir;
  double epsilon = 0.2;
  double nu = 0.0;  // 0 = model default
  std::size_t blocks = 0;
  std::size_t block_size = 0;
  bool force = false;
  CommonFlags common;
};

int run_simulate(const SimulateArgs& args) {
  SimConfig config;
  config.model = parse_model(args.model);
  config.dep = parse_dep(args.dep);
  config.n = args.n;
  config.p = args.p;
  config.reps = args.reps;
  config.seed = args.seed;
  config.epsilon = args.epsilon;
  config.nu = args.nu != 0.0
                  ? args.nu
                  : (config.model == ModelKind::EllipticalT ? 10.0 : 1.5);
  if (config.model == ModelKind::BlockDiag) {
    config.blocks = args.blocks != 0 ? args.blocks : 4;
    config.block_size =
        args.block_size != 0 ? args.block_size : config.p / config.blocks;
  }
  validate_config(config);

  const std::filesystem::path dir(args.out_dir);
  const auto summary_path = dir / "summary.json";
  if (std::filesystem::exists(summary_path) && !args.force)
    throw std::invalid_argument("output '" + summary_path.string() +
                                "' already exists; pass --force to overwrite");
  std::filesystem::create_directories(dir);

  ExperimentOptions opts;
  opts.threads = resolve_thread_flag(args.common.threads);
  const CellSummary cell = run_gaussian_approx_cell(config, opts);
  write_cell_csv(cell, dir);

  Json out = Json::object();
  out.set("model", args.model);
  out.set("dep", args.dep);
  out.set("n", config.n);
  out.set("p", config.p);
  out.set("R", config.reps);
  out.set("ks", cell.ks_max);
  out.set("ks_absmax", cell.ks_abs_max);
  out.set("seed", config.seed);
  out.set("epsilon", config.epsilon);
  out.set("nu", config.nu);

  std::ofstream summary(summary_path);
  if (!summary) throw std::runtime_error("cannot write '" + summary_path.string() + "'");
  summary << out.dump(2) << '\n';
  emit(out);

  Json params = Json::object();
  params.set("model", args.model);
  params.set("dep", args.dep);
  params.set("n", config.n);
  params.set("p", config.p);
  params.set("reps", config.reps);
  params.set("epsilon", config.epsilon);
  params.set("nu", config.nu);
  params.set("out", args.out_dir);
  write_manifest_for("simulate", std::move(params), args.seed, {},
                     args.common.manifest_path.empty()
                         ? (dir / "manifest.json").string()
                         : args.common.manifest_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-dimensional pairwise-kernel statistics with bootstrap inference"};
  app.require_subcommand(1);

  UstatArgs ustat_args;
  auto* ustat_cmd = app.add_subcommand("ustat", "pairwise-kernel summary of a sample");
  ustat_cmd->add_option("data", ustat_args.data_path, "CSV input")->required();
  ustat_cmd->add_option("--kernel", ustat_args.kernel, "mean | cov | kendall");
  ustat_cmd->add_option("--matrix-out", ustat_args.matrix_out,
                        "write the reconstructed p x p matrix here");
  add_common(ustat_cmd, ustat_args.common, "ustat.manifest.json");

  BootArgs boot_args;
  auto* boot_cmd = app.add_subcommand("boot", "bootstrap replicates and quantiles");
  boot_cmd->add_option("data", boot_args.data_path, "CSV input")->required();
  boot_cmd->add_option("--kernel", boot_args.kernel, "mean | cov | kendall");
  boot_cmd->add_option("--method", boot_args.method, "eb | rw | rwflat | mult");
  boot_cmd->add_option("--B", boot_args.B, "replicate count");
  boot_cmd->add_option("--stat", boot_args.stat, "max | absmax | offabsmax");
  boot_cmd->add_option("--scale", boot_args.scale, "raw | rescaled");
  boot_cmd->add_option("--alpha", boot_args.alphas, "quantile levels")->delimiter(',');
  boot_cmd->add_option("--seed", boot_args.seed, "master seed");
  boot_cmd->add_option("--dump-draws", boot_args.dump_draws,
                       "write one replicate value per line");
  add_common(boot_cmd, boot_args.common, "boot.manifest.json");

  ThresholdArgs thr_args;
  auto* thr_cmd =
      app.add_subcommand("threshold", "bootstrap-selected covariance thresholding");
  thr_cmd->add_option("data", thr_args.data_path, "CSV input")->required();
  thr_cmd->add_option("--alpha", thr_args.alpha, "level in (0,1)");
  thr_cmd->add_option("--beta", thr_args.beta, "threshold inflation in (0,1]");
  thr_cmd->add_option("--B", thr_args.B, "replicate count");
  thr_cmd->add_option("--seed", thr_args.seed, "master seed");
  thr_cmd->add_flag("--keep-diag", thr_args.keep_diag,
                    "leave diagonal entries unthresholded");
  thr_cmd->add_option("--matrix-out", thr_args.matrix_out,
                      "thresholded matrix CSV path");
  add_common(thr_cmd, thr_args.common, "threshold.manifest.json");

  TestArgs test_args;
  auto* test_cmd = app.add_subcommand("test", "simultaneous matrix test");
  test_cmd->add_option("which", test_args.which, "cov | kendall")
      ->required()
      ->check(CLI::IsMember({"cov", "kendall"}));
  test_cmd->add_option("data", test_args.data_path, "CSV input")->required();
  test_cmd->add_option("--null", test_args.null_path, "null matrix CSV")->required();
  test_cmd->add_option("--alpha", test_args.alpha, "level in (0,1)");
  test_cmd->add_option("--B", test_args.B, "replicate count");
  test_cmd->add_option("--seed", test_args.seed, "master seed");
  add_common(test_cmd, test_args.common, "test.manifest.json");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "gaussian-approximation study cell");
  sim_cmd->add_option("--model", sim_args.model, "m1 | m2 | block");
  sim_cmd->add_option("--dep", sim_args.dep, "d1 | d2 | d3");
  sim_cmd->add_option("--n", sim_args.n, "sample size");
  sim_cmd->add_option("--p", sim_args.p, "dimension");
  sim_cmd->add_option("--reps", sim_args.reps, "replications");
  sim_cmd->add_option("--seed", sim_args.seed, "master seed");
  sim_cmd->add_option("--out", sim_args.out_dir, "output directory")->required();
  sim_cmd->add_option("--epsilon", sim_args.epsilon, "contamination fraction (m1)");
  sim_cmd->add_option("--nu", sim_args.nu, "contamination scale (m1) or dof (m2)");
  sim_cmd->add_option("--L", sim_args.blocks, "block count (block model)");
  sim_cmd->add_option("--m", sim_args.block_size, "block size (block model)");
  sim_cmd->add_flag("--force", sim_args.force, "overwrite existing outputs");
  add_common(sim_cmd, sim_args.common, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (ustat_cmd->parsed()) return run_ustat(ustat_args);
    if (boot_cmd->parsed()) return run_boot(boot_args);
    if (thr_cmd->parsed()) return run_threshold(thr_args);
    if (test_cmd->parsed()) return run_test(test_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
  } catch (const ustatboot::resource_limit_error& e) {
    std::fprintf(stderr, "ustat-boot: %s\n", e.what());
    return kExitResource;
  } catch (const ustatboot::numerical_error& e) {
    std::fprintf(stderr, "ustat-boot: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "ustat-boot: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ustat-boot: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
