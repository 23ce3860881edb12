#include "efcp/io.hpp"

#include <charconv>
#include <cmath>

#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "efcp/errors.hpp"
#include "efcp/version.hpp"

namespace efcp {

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value)) {
    throw invalid_input_error("line " + std::to_string(line_no) +
                              ": cannot parse number '" + std::string(token) +
                              "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string safe_label(const std::string& label, std::size_t index) {
  if (label.empty()) return "f" + std::to_string(index + 1);
  if (label.find(',') != std::string::npos ||
      label.find('\n') != std::string::npos) {
    throw invalid_input_error("label '" + label +
                              "' cannot contain commas or newlines");
  }
  return label;
}

void check_uniform_times(const std::vector<double>& times) {
  const std::size_t t = times.size();
  if (t < 3) {
    throw invalid_input_error("dataset needs at least 3 time points");
  }
  const double lo = times.front();
  const double hi = times.back();
  if (!(hi > lo)) {
    throw invalid_input_error("time column must be strictly increasing");
  }
  const double range = hi - lo;
  for (std::size_t j = 0; j < t; ++j) {
    const double expected =
        lo + range * static_cast<double>(j) / static_cast<double>(t - 1);
    if (std::fabs(times[j] - expected) > 1e-6 * range) {
      throw invalid_input_error("time column must be uniformly spaced");
    }
    if (j > 0 && !(times[j] > times[j - 1])) {
      throw invalid_input_error("time column must be strictly increasing");
    }
  }
}

Dataset assemble_dataset(const std::vector<double>& times,
                         std::vector<std::string> labels,
                         std::vector<std::vector<double>> columns) {
  check_uniform_times(times);
  Dataset ds;
  ds.grid = Grid{times.size(), times.front(), times.back()};
  ds.functions.resize(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    ds.functions[c].grid = ds.grid;
    ds.functions[c].label = std::move(labels[c]);
    ds.functions[c].values = std::move(columns[c]);
    validate(ds.functions[c]);
  }
  if (ds.functions.empty()) {
    throw invalid_input_error("dataset has no function columns");
  }
  return ds;
}

}  // namespace

std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "t";
  for (std::size_t c = 0; c < ds.functions.size(); ++c) {
    out += ',';
    out += safe_label(ds.functions[c].label, c);
  }
  out += '\n';
  for (std::size_t j = 0; j < ds.grid.num_points; ++j) {
    out += format_double(ds.grid.original(j));
    for (const auto& f : ds.functions) {
      out += ',';
      out += format_double(f.values[j]);
    }
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> labels;
  std::vector<double> times;
  std::vector<std::vector<double>> columns;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tokens = split_csv_line(line);
    if (labels.empty()) {
      if (tokens.size() < 2) {
        throw invalid_input_error("CSV header needs a time column plus at "
                                  "least one function column");
      }
      labels.assign(tokens.begin() + 1, tokens.end());
      columns.assign(labels.size(), {});
      continue;
    }
    if (tokens.size() != labels.size() + 1) {
      throw invalid_input_error("line " + std::to_string(line_no) +
                                ": expected " +
                                std::to_string(labels.size() + 1) +
                                " columns, got " +
                                std::to_string(tokens.size()));
    }
    times.push_back(parse_double(tokens[0], line_no));
    for (std::size_t c = 0; c < columns.size(); ++c) {
      columns[c].push_back(parse_double(tokens[c + 1], line_no));
    }
  }
  if (labels.empty()) {
    throw invalid_input_error("empty CSV input");
  }
  return assemble_dataset(times, std::move(labels), std::move(columns));
}

std::string dataset_to_json(const Dataset& ds) {
  nlohmann::ordered_json doc;
  doc["t"] = nlohmann::json::array();
  for (std::size_t j = 0; j < ds.grid.num_points; ++j) {
    doc["t"].push_back(ds.grid.original(j));
  }
  doc["labels"] = nlohmann::json::array();
  doc["values"] = nlohmann::json::array();
  for (std::size_t c = 0; c < ds.functions.size(); ++c) {
    doc["labels"].push_back(safe_label(ds.functions[c].label, c));
    doc["values"].push_back(ds.functions[c].values);
  }
  return doc.dump(2) + "\n";
}

Dataset dataset_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error(std::string("JSON parse failure: ") + e.what());
  }
  try {
    const auto times = doc.at("t").get<std::vector<double>>();
    auto labels = doc.at("labels").get<std::vector<std::string>>();
    auto values = doc.at("values").get<std::vector<std::vector<double>>>();
    if (labels.size() != values.size()) {
      throw invalid_input_error("labels and values must have equal counts");
    }
    for (const auto& col : values) {
      if (col.size() != times.size()) {
        throw invalid_input_error("every function needs one value per time");
      }
    }
    return assemble_dataset(times, std::move(labels), std::move(values));
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input_error(std::string("JSON dataset malformed: ") +
                              e.what());
  }
}

Dataset read_dataset(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".json") return dataset_from_json(text);
  return dataset_from_csv(text);
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  if (path.extension() == ".json") {
    write_text_file(path, dataset_to_json(ds));
  } else {
    write_text_file(path, dataset_to_csv(ds));
  }
}

namespace {

nlohmann::ordered_json function_to_json(const FunctionSample& f) {
  nlohmann::ordered_json j;
  j["label"] = f.label;
  auto t = nlohmann::json::array();
  for (std::size_t k = 0; k < f.grid.num_points; ++k) {
    t.push_back(f.grid.original(k));
  }
  j["t"] = std::move(t);
  j["values"] = f.values;
  return j;
}

}  // namespace

std::string result_to_json(const ChangepointResult& res, const TestConfig& cfg,
                           const Dataset& input, std::size_t smooth_window,
                           std::size_t smooth_passes) {
  nlohmann::ordered_json doc;
  doc["tool"] = "efcp";
  doc["version"] = kVersion;
  doc["method"] = res.method;
  doc["n"] = input.functions.size();
  doc["statistic"] = res.statistic;
  doc["k_star"] = res.k_star;
  if (res.k_star >= 1 && res.k_star <= input.functions.size()) {
    doc["k_star_label"] = input.functions[res.k_star - 1].label;
  } else {
    doc["k_star_label"] = nullptr;
  }
  doc["p_value"] = res.p_value;
  doc["alpha"] = cfg.alpha;
  doc["decision"] = res.p_value <= cfg.alpha ? "reject" : "retain";
  doc["lambda2"] = res.lambda2;
  if (res.lambda2_p_value.has_value()) {
    doc["lambda2_p_value"] = *res.lambda2_p_value;
  } else {
    doc["lambda2_p_value"] = nullptr;
  }
  doc["degenerate"] = res.degenerate;
  doc["alignment_converged"] = res.alignment_converged;

  nlohmann::ordered_json config;
  config["alpha"] = cfg.alpha;
  config["mc_reps"] = cfg.mc_reps;
  config["mc_grid"] = cfg.mc_grid;
  nlohmann::ordered_json comps;
  if (cfg.components.kind == ComponentSelector::Kind::fixed) {
    comps["kind"] = "fixed";
    comps["count"] = cfg.components.fixed_count;
  } else {
    comps["kind"] = "cumulative-fraction";
    comps["fraction"] = cfg.components.fraction;
  }
  config["components"] = std::move(comps);
  config["eigen_truncation"] = cfg.eigen_truncation;
  config["per_prefix"] = cfg.per_prefix;
  config["alignment"] = {
      {"tol", cfg.alignment.tol},
      {"max_iter", cfg.alignment.max_iter},
      {"init", cfg.alignment.init == AlignmentConfig::Init::elastic_medoid
                   ? "elastic-medoid"
                   : "l2-medoid"},
      {"center_warps", cfg.alignment.center_warps},
  };
  config["lambda2_permutations"] = cfg.lambda2_permutations;
  config["smooth_window"] = smooth_window;
  config["smooth_passes"] = smooth_passes;
  doc["config"] = std::move(config);

  doc["rng"] = {
      {"seed", cfg.rng_seed},
      {"limit_stream_seed", limit_stream_seed(cfg)},
  };

  doc["grid"] = {
      {"num_points", input.grid.num_points},
      {"domain_min", input.grid.domain_min},
      {"domain_max", input.grid.domain_max},
  };
  doc["cusum_trace"] = res.cusum_trace;
  doc["mean_before"] = function_to_json(res.mean_before);
  doc["mean_after"] = function_to_json(res.mean_after);
  doc["delta_hat"] = function_to_json(res.delta_hat);
  return doc.dump(2) + "\n";
}

namespace {

Dataset warps_as_dataset(const AlignmentResult& ar,
                         const std::vector<std::string>& labels) {
  Dataset ds;
  ds.grid = ar.warps.front().grid;
  ds.functions.resize(ar.warps.size());
  const double lo = ds.grid.domain_min;
  const double range = ds.grid.domain_max - ds.grid.domain_min;
  for (std::size_t i = 0; i < ar.warps.size(); ++i) {
    ds.functions[i].grid = ds.grid;
    ds.functions[i].label = labels[i];
    ds.functions[i].values.resize(ar.warps[i].values.size());
    for (std::size_t j = 0; j < ar.warps[i].values.size(); ++j) {
      ds.functions[i].values[j] = lo + range * ar.warps[i].values[j];
    }
  }
  return ds;
}

}  // namespace

void write_plot_data(const std::filesystem::path& dir,
                     const ChangepointResult& res, const Dataset& input,
                     const AlignmentResult* alignment) {
  std::filesystem::create_directories(dir);

  std::string trace = "k,cusum\n";
  for (std::size_t k = 0; k < res.cusum_trace.size(); ++k) {
    trace += std::to_string(k + 1);
    trace += ',';
    trace += format_double(res.cusum_trace[k]);
    trace += '\n';
  }
  write_text_file(dir / "cusum_trace.csv", trace);

  std::string means = "t,mean_before,mean_after,delta_hat\n";
  for (std::size_t j = 0; j < res.mean_before.grid.num_points; ++j) {
    means += format_double(res.mean_before.grid.original(j));
    means += ',';
    means += format_double(res.mean_before.values[j]);
    means += ',';
    means += format_double(res.mean_after.values[j]);
    means += ',';
    means += format_double(res.delta_hat.values[j]);
    means += '\n';
  }
  write_text_file(dir / "segment_means.csv", means);

  if (alignment != nullptr) {
    write_alignment_files(dir, *alignment, input);
  }
}

void write_alignment_files(const std::filesystem::path& dir,
                           const AlignmentResult& ar, const Dataset& input) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> labels(input.functions.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = safe_label(input.functions[i].label, i);
  }
  Dataset aligned;
  aligned.grid = input.grid;
  aligned.functions = ar.aligned_f;
  write_text_file(dir / "aligned_functions.csv", dataset_to_csv(aligned));
  write_text_file(dir / "warping_functions.csv",
                  dataset_to_csv(warps_as_dataset(ar, labels)));

  Dataset mean;
  mean.grid = input.grid;
  mean.functions = {ar.mean_f};
  mean.functions[0].label = "karcher_mean";
  write_text_file(dir / "karcher_mean.csv", dataset_to_csv(mean));
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw invalid_input_error("cannot open '" + path.string() +
                              "' for writing");
  }
  out << content;
  if (!out) {
    throw invalid_input_error("failed writing '" + path.string() + "'");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw invalid_input_error("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace efcp
