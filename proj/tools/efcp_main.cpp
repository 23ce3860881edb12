#include <chrono>
#include <cstdlib>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "efcp/changepoint.hpp"
#include "efcp/errors.hpp"
#include "efcp/io.hpp"
#include "efcp/karcher.hpp"
#include "efcp/rng.hpp"
#include "efcp/simulate.hpp"
#include "efcp/version.hpp"

namespace {

using efcp::ChangepointResult;
using efcp::Dataset;
using efcp::TestConfig;

int default_mc_reps() {
  if (const char* env = std::getenv("EFCP_MC_REPS")) {
    const int v = std::atoi(env);
    if (v >= 100) return v;
  }
  return 10000;
}

efcp::ComponentSelector parse_components(const std::string& text) {
  if (text.find('.') == std::string::npos) {
    try {
      return efcp::ComponentSelector::fixed(std::stoi(text));
    } catch (const std::exception&) {
      throw efcp::invalid_input_error("cannot parse --components '" + text +
                                      "'");
    }
  }
  try {
    return efcp::ComponentSelector::cumulative(std::stod(text));
  } catch (const std::exception&) {
    throw efcp::invalid_input_error("cannot parse --components '" + text +
                                    "'");
  }
}

efcp::Design parse_design(const std::string& name) {
  if (name == "amplitude") return efcp::Design::amplitude_change;
  if (name == "phase") return efcp::Design::phase_change;
  if (name == "sensitivity") return efcp::Design::sensitivity;
  if (name == "null") return efcp::Design::null_design;
  throw efcp::invalid_input_error("unknown design '" + name + "'");
}

struct DetectOptions {
  std::string input;
  std::string method;
  std::string out;
  std::string plot_dir;
  double alpha = 0.05;
  int mc_reps = default_mc_reps();
  int mc_grid = 1001;
  std::string components = "0.95";
  int eigen_truncation = 50;
  std::uint64_t seed = 0;
  bool per_prefix = false;
  double align_tol = 1e-4;
  int align_max_iter = 20;
  std::size_t smooth_window = 0;
  std::size_t smooth_passes = 1;
  int lambda2_permutations = 0;
};

TestConfig make_config(const DetectOptions& opt) {
  TestConfig cfg;
  cfg.alpha = opt.alpha;
  cfg.mc_reps = opt.mc_reps;
  cfg.mc_grid = opt.mc_grid;
  cfg.components = parse_components(opt.components);
  cfg.eigen_truncation = opt.eigen_truncation;
  cfg.rng_seed = opt.seed;
  cfg.per_prefix = opt.per_prefix;
  cfg.alignment.tol = opt.align_tol;
  cfg.alignment.max_iter = opt.align_max_iter;
  cfg.lambda2_permutations = opt.lambda2_permutations;
  cfg.validate();
  return cfg;
}

std::vector<efcp::FunctionSample> preprocess(
    const Dataset& ds, std::size_t smooth_window, std::size_t smooth_passes) {
  std::vector<efcp::FunctionSample> fs = ds.functions;
  if (smooth_window > 0) {
    efcp::SmoothingConfig cfg{smooth_window, smooth_passes};
    for (auto& f : fs) f = efcp::box_smooth(f, cfg);
  }
  return fs;
}

bool is_elastic(const std::string& method) {
  return method != "cross-sectional";
}

ChangepointResult run_method(const std::string& method,
                             const std::vector<efcp::FunctionSample>& fs,
                             const efcp::AlignmentResult* ar,
                             const TestConfig& cfg) {
  if (method == "cross-sectional") return efcp::cross_sectional_test(fs, cfg);
  if (ar != nullptr) {
    if (method == "elastic-amp") return efcp::amplitude_test_ff(*ar, cfg);
    if (method == "elastic-phase") return efcp::phase_test_ff(*ar, cfg);
    if (method == "elastic-amp-pca") return efcp::amplitude_test_pca(*ar, cfg);
    if (method == "elastic-phase-pca") return efcp::phase_test_pca(*ar, cfg);
  } else {
    if (method == "elastic-amp") return efcp::amplitude_test_ff(fs, cfg);
    if (method == "elastic-phase") return efcp::phase_test_ff(fs, cfg);
    if (method == "elastic-amp-pca") return efcp::amplitude_test_pca(fs, cfg);
    if (method == "elastic-phase-pca") return efcp::phase_test_pca(fs, cfg);
  }
  throw efcp::invalid_input_error("unknown method '" + method + "'");
}

int cmd_detect(const DetectOptions& opt) {
  const Dataset ds = efcp::read_dataset(opt.input);
  const TestConfig cfg = make_config(opt);
  const auto fs = preprocess(ds, opt.smooth_window, opt.smooth_passes);

  std::optional<efcp::AlignmentResult> ar;
  if (is_elastic(opt.method) && !cfg.per_prefix) {
    ar = efcp::karcher_mean_align(fs, cfg.alignment);
  }
  const ChangepointResult res =
      run_method(opt.method, fs, ar ? &*ar : nullptr, cfg);

  const std::string doc =
      efcp::result_to_json(res, cfg, ds, opt.smooth_window,
                           opt.smooth_window > 0 ? opt.smooth_passes : 0);
  if (opt.out.empty()) {
    std::cout << doc;
  } else {
    efcp::write_text_file(opt.out, doc);
  }
  if (!opt.plot_dir.empty()) {
    if (is_elastic(opt.method) && !ar) {
      ar = efcp::karcher_mean_align(fs, cfg.alignment);
    }
    efcp::write_plot_data(opt.plot_dir, res,
                          Dataset{ds.grid, fs}, ar ? &*ar : nullptr);
  }
  return 0;
}

struct SimulateOptions {
  std::string design = "amplitude";
  std::string null_base = "amplitude";
  std::size_t n = 75;
  std::size_t changepoint = 30;
  std::size_t grid_size = 101;
  std::uint64_t seed = 0;
  std::string out;
};

efcp::SimSpec make_spec(const SimulateOptions& opt) {
  efcp::SimSpec spec;
  spec.design = parse_design(opt.design);
  spec.null_base = parse_design(opt.null_base);
  spec.n = opt.n;
  spec.changepoint = opt.changepoint;
  spec.grid_size = opt.grid_size;
  spec.rng_seed = opt.seed;
  spec.validate();
  return spec;
}

int cmd_simulate(const SimulateOptions& opt) {
  const efcp::SimSpec spec = make_spec(opt);
  const auto fs = efcp::generate(spec);
  Dataset ds;
  ds.grid = fs.front().grid;
  ds.functions = fs;

  const std::string echo =
      "design=" + opt.design +
      (spec.design == efcp::Design::null_design ? " base=" + opt.null_base
                                                : "") +
      " n=" + std::to_string(spec.n) +
      " changepoint=" + std::to_string(spec.changepoint) +
      " grid=" + std::to_string(spec.grid_size) +
      " seed=" + std::to_string(spec.rng_seed);
  if (opt.out.empty()) {
    std::cerr << echo << "\n";
    std::cout << efcp::dataset_to_csv(ds);
  } else {
    efcp::write_dataset(opt.out, ds);
    std::cout << echo << " -> " << opt.out << "\n";
  }
  return 0;
}

struct BenchmarkOptions {
  std::string design = "amplitude";
  std::string null_base = "amplitude";
  int reps = 100;
  std::string methods;  // comma-separated; default depends on design
  std::string out;
  std::size_t n = 75;
  std::size_t changepoint = 30;
  std::size_t grid_size = 101;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  int mc_reps = 0;  // 0 -> env default
  int mc_grid = 1001;
};

std::vector<std::string> split_methods(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(',', start);
    if (pos == std::string::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    if (pos > start) out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  if (out.empty()) {
    throw efcp::invalid_input_error("--methods must name at least one method");
  }
  return out;
}

int cmd_benchmark(const BenchmarkOptions& opt) {
  std::string methods_text = opt.methods;
  if (methods_text.empty()) {
    methods_text = (opt.design == "phase")
                       ? "elastic-phase-pca,cross-sectional"
                       : "elastic-amp-pca,cross-sectional";
  }
  const auto methods = split_methods(methods_text);
  if (opt.reps < 1) {
    throw efcp::invalid_input_error("--reps must be at least 1");
  }

  TestConfig cfg;
  cfg.alpha = opt.alpha;
  cfg.mc_reps = opt.mc_reps > 0 ? opt.mc_reps : default_mc_reps();
  cfg.mc_grid = opt.mc_grid;

  SimulateOptions sim;
  sim.design = opt.design;
  sim.null_base = opt.null_base;
  sim.n = opt.n;
  sim.changepoint = opt.changepoint;
  sim.grid_size = opt.grid_size;

  const std::size_t n_elastic =
      std::count_if(methods.begin(), methods.end(),
                    [](const std::string& m) { return is_elastic(m); });

  std::string csv = "replicate,method,detected,k_star,p_value,runtime_seconds\n";
  struct Tally {
    int detected = 0;
    std::vector<double> k_stars;
    double runtime = 0.0;
  };
  std::vector<Tally> tallies(methods.size());

  using clock = std::chrono::steady_clock;
  for (int rep = 0; rep < opt.reps; ++rep) {
    sim.seed = efcp::derive_seed(opt.seed, static_cast<std::uint64_t>(rep));
    const efcp::SimSpec spec = make_spec(sim);
    const auto fs = efcp::generate(spec);
    cfg.rng_seed = sim.seed;

    std::optional<efcp::AlignmentResult> ar;
    double align_seconds = 0.0;
    if (n_elastic > 0) {
      const auto t0 = clock::now();
      ar = efcp::karcher_mean_align(fs, cfg.alignment);
      align_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto t0 = clock::now();
      const ChangepointResult res =
          run_method(methods[mi], fs, ar ? &*ar : nullptr, cfg);
      double seconds = std::chrono::duration<double>(clock::now() - t0).count();
      if (is_elastic(methods[mi])) {
        seconds += align_seconds / static_cast<double>(n_elastic);
      }
      const bool detected = res.p_value <= cfg.alpha;
      csv += std::to_string(rep + 1) + ',' + methods[mi] + ',' +
             (detected ? "1" : "0") + ',' + std::to_string(res.k_star) + ',' +
             efcp::format_double(res.p_value) + ',' +
             efcp::format_double(seconds) + '\n';
      auto& tally = tallies[mi];
      tally.detected += detected ? 1 : 0;
      tally.k_stars.push_back(static_cast<double>(res.k_star));
      tally.runtime += seconds;
    }
  }

  if (!opt.out.empty()) {
    efcp::write_text_file(opt.out, csv);
  } else {
    std::cout << csv;
  }

  auto quantile = [](std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  std::cout << "design=" << opt.design << " reps=" << opt.reps << "\n";
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const auto& tally = tallies[mi];
    const double rate =
        static_cast<double>(tally.detected) / static_cast<double>(opt.reps);
    std::cout << methods[mi] << ": detection_rate=" << rate
              << " median_k_star=" << quantile(tally.k_stars, 0.5)
              << " k_star_iqr="
              << quantile(tally.k_stars, 0.75) - quantile(tally.k_stars, 0.25)
              << " mean_runtime_s=" << tally.runtime / opt.reps << "\n";
  }
  return 0;
}

struct AlignOptions {
  std::string input;
  std::string out_dir;
  double tol = 1e-4;
  int max_iter = 20;
  std::size_t smooth_window = 0;
  std::size_t smooth_passes = 1;
};

int cmd_align(const AlignOptions& opt) {
  const Dataset ds = efcp::read_dataset(opt.input);
  const auto fs = preprocess(ds, opt.smooth_window, opt.smooth_passes);
  efcp::AlignmentConfig cfg;
  cfg.tol = opt.tol;
  cfg.max_iter = opt.max_iter;
  const efcp::AlignmentResult ar = efcp::karcher_mean_align(fs, cfg);
  efcp::write_alignment_files(opt.out_dir, ar, ds);
  std::cout << "aligned " << fs.size() << " functions in " << ar.iterations
            << " iterations (converged=" << (ar.converged ? "yes" : "no")
            << ") -> " << opt.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic functional changepoint detection"};
  app.set_version_flag("--version", efcp::kVersion);
  app.require_subcommand(1);

  DetectOptions det;
  auto* detect = app.add_subcommand(
      "detect", "Run a changepoint test on a dataset file");
  detect->add_option("--input", det.input, "Dataset CSV/JSON path")
      ->required();
  detect
      ->add_option("--method", det.method,
                   "elastic-amp | elastic-phase | elastic-amp-pca | "
                   "elastic-phase-pca | cross-sectional")
      ->required()
      ->check(CLI::IsMember({"elastic-amp", "elastic-phase", "elastic-amp-pca",
                             "elastic-phase-pca", "cross-sectional"}));
  detect->add_option("--out", det.out, "Write the result document here");
  detect->add_option("--plot-data", det.plot_dir,
                     "Directory for plot-ready CSVs");
  detect->add_option("--alpha", det.alpha, "Significance level");
  detect->add_option("--mc-reps", det.mc_reps,
                     "Monte-Carlo replicates for the limit law");
  detect->add_option("--mc-grid", det.mc_grid, "Brownian-bridge grid size");
  detect->add_option("--components", det.components,
                     "PCA components: integer count or cumulative fraction");
  detect->add_option("--eigen-truncation", det.eigen_truncation,
                     "Max eigenvalues in the limit sum");
  detect->add_option("--seed", det.seed, "RNG seed");
  detect->add_flag("--per-prefix", det.per_prefix,
                   "Re-estimate Karcher means per prefix (slow)");
  detect->add_option("--align-tol", det.align_tol, "Alignment tolerance");
  detect->add_option("--align-max-iter", det.align_max_iter,
                     "Alignment iteration cap");
  detect->add_option("--smooth-window", det.smooth_window,
                     "Box-filter width (0 = no smoothing)");
  detect->add_option("--smooth-passes", det.smooth_passes,
                     "Box-filter passes");
  detect->add_option("--lambda2-permutations", det.lambda2_permutations,
                     "Permutation count for the lambda2 p-value (0 = off)");

  SimulateOptions sim;
  auto* simulate =
      app.add_subcommand("simulate", "Generate a simulation-design dataset");
  simulate
      ->add_option("--design", sim.design,
                   "amplitude | phase | sensitivity | null")
      ->check(CLI::IsMember({"amplitude", "phase", "sensitivity", "null"}));
  simulate
      ->add_option("--null-base", sim.null_base,
                   "Base design for --design null")
      ->check(CLI::IsMember({"amplitude", "phase", "sensitivity"}));
  simulate->add_option("--n", sim.n, "Number of functions");
  simulate->add_option("--changepoint", sim.changepoint,
                       "Last pre-change index");
  simulate->add_option("--grid-size", sim.grid_size, "Grid points");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--out", sim.out, "Output CSV/JSON path");

  BenchmarkOptions bench;
  auto* benchmark = app.add_subcommand(
      "benchmark", "Replicate detection runs over a simulation design");
  benchmark
      ->add_option("--design", bench.design,
                   "amplitude | phase | sensitivity | null")
      ->check(CLI::IsMember({"amplitude", "phase", "sensitivity", "null"}));
  benchmark->add_option("--null-base", bench.null_base,
                        "Base design for --design null");
  benchmark->add_option("--reps", bench.reps, "Replicates");
  benchmark->add_option("--methods", bench.methods,
                        "Comma-separated method list");
  benchmark->add_option("--out", bench.out, "Per-replicate CSV path");
  benchmark->add_option("--n", bench.n, "Functions per replicate");
  benchmark->add_option("--changepoint", bench.changepoint,
                        "Last pre-change index");
  benchmark->add_option("--grid-size", bench.grid_size, "Grid points");
  benchmark->add_option("--seed", bench.seed, "Base RNG seed");
  benchmark->add_option("--alpha", bench.alpha, "Significance level");
  benchmark->add_option("--mc-reps", bench.mc_reps,
                        "Monte-Carlo replicates (0 = default)");
  benchmark->add_option("--mc-grid", bench.mc_grid,
                        "Brownian-bridge grid size");

  AlignOptions aln;
  auto* align = app.add_subcommand(
      "align", "Karcher-mean alignment; writes aligned/warp/mean CSVs");
  align->add_option("--input", aln.input, "Dataset CSV/JSON path")->required();
  align->add_option("--out-dir", aln.out_dir, "Output directory")->required();
  align->add_option("--tol", aln.tol, "Convergence tolerance");
  align->add_option("--max-iter", aln.max_iter, "Iteration cap");
  align->add_option("--smooth-window", aln.smooth_window,
                    "Box-filter width (0 = no smoothing)");
  align->add_option("--smooth-passes", aln.smooth_passes,
                    "Box-filter passes");

  try {
    app.parse(argc, argv);
    if (detect->parsed()) return cmd_detect(det);
    if (simulate->parsed()) return cmd_simulate(sim);
    if (benchmark->parsed()) return cmd_benchmark(bench);
    if (align->parsed()) return cmd_align(aln);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const efcp::invalid_input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const efcp::degenerate_data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
