#include <cmath>
#include <cstdio>

#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "efcp/changepoint.hpp"
#include "efcp/errors.hpp"
#include "efcp/io.hpp"
#include "efcp/rng.hpp"
#include "efcp/simulate.hpp"

using namespace efcp;

namespace {

Dataset sample_dataset(std::size_t n = 4, std::size_t t = 21,
                       std::uint64_t seed = 1) {
  Dataset ds;
  ds.grid = Grid{t, -6.0, 6.0};
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    FunctionSample f;
    f.grid = ds.grid;
    f.label = "fn" + std::to_string(i + 1);
    f.values.resize(t);
    for (auto& v : f.values) v = rng.normal();
    ds.functions.push_back(f);
  }
  return ds;
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double x : {0.0, 1.0, -1.5, 0.1, 3.141592653589793, 1e-300, -2.5e17,
                   0.30000000000000004}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("csv round-trip") {
  const Dataset ds = sample_dataset();
  const std::string text = dataset_to_csv(ds);
  const Dataset back = dataset_from_csv(text);
  REQUIRE(back.functions.size() == ds.functions.size());
  CHECK(back.grid.num_points == ds.grid.num_points);
  CHECK(back.grid.domain_min == doctest::Approx(-6.0));
  CHECK(back.grid.domain_max == doctest::Approx(6.0));
  for (std::size_t i = 0; i < ds.functions.size(); ++i) {
    CHECK(back.functions[i].label == ds.functions[i].label);
    CHECK(back.functions[i].values == ds.functions[i].values);  // exact
  }
  // serialization is stable
  CHECK(dataset_to_csv(back) == text);
}

TEST_CASE("csv header and layout") {
  const Dataset ds = sample_dataset(2, 5);
  const std::string text = dataset_to_csv(ds);
  CHECK(text.rfind("t,fn1,fn2\n", 0) == 0);
  // one row per grid point plus header
  std::size_t rows = 0;
  for (char c : text) rows += c == '\n' ? 1 : 0;
  CHECK(rows == 6);
}

TEST_CASE("csv rejects malformed input") {
  CHECK_THROWS_AS(dataset_from_csv(""), invalid_input_error);
  CHECK_THROWS_AS(dataset_from_csv("t,a\n"), invalid_input_error);
  CHECK_THROWS_AS(dataset_from_csv("t,a\n0,1\n"), invalid_input_error);
  // non-increasing time
  CHECK_THROWS_AS(dataset_from_csv("t,a\n0,1\n0,2\n1,3\n"),
                  invalid_input_error);
  // ragged row
  CHECK_THROWS_AS(dataset_from_csv("t,a\n0,1\n0.5\n1,3\n"),
                  invalid_input_error);
  // non-uniform spacing
  CHECK_THROWS_AS(dataset_from_csv("t,a\n0,1\n0.1,2\n1,3\n"),
                  invalid_input_error);
  // non-numeric entry
  CHECK_THROWS_AS(dataset_from_csv("t,a\n0,1\n0.5,x\n1,3\n"),
                  invalid_input_error);
}

TEST_CASE("json round-trip") {
  const Dataset ds = sample_dataset(3, 11);
  const std::string text = dataset_to_json(ds);
  const Dataset back = dataset_from_json(text);
  REQUIRE(back.functions.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.functions[i].values == ds.functions[i].values);
    CHECK(back.functions[i].label == ds.functions[i].label);
  }
}

TEST_CASE("file dispatch by extension") {
  const Dataset ds = sample_dataset(2, 7);
  const auto dir = std::filesystem::temp_directory_path() / "efcp_io_test";
  std::filesystem::create_directories(dir);
  write_dataset(dir / "d.csv", ds);
  write_dataset(dir / "d.json", ds);
  const Dataset a = read_dataset(dir / "d.csv");
  const Dataset b = read_dataset(dir / "d.json");
  CHECK(a.functions[0].values == ds.functions[0].values);
  CHECK(b.functions[1].values == ds.functions[1].values);
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing file raises input error") {
  CHECK_THROWS_AS(read_dataset("/nonexistent/path/file.csv"),
                  invalid_input_error);
}

TEST_CASE("result document structure and determinism") {
  SimSpec spec;
  spec.n = 10;
  spec.changepoint = 5;
  spec.grid_size = 41;
  spec.rng_seed = 31;
  const auto fs = gen_amplitude_change(spec);
  Dataset ds;
  ds.grid = fs.front().grid;
  ds.functions = fs;

  TestConfig cfg;
  cfg.mc_reps = 199;
  cfg.mc_grid = 201;
  cfg.rng_seed = 31;
  const auto res = amplitude_test_ff(fs, cfg);
  const std::string doc = result_to_json(res, cfg, ds, 0, 0);

  // determinism: identical evaluation produces identical bytes
  const auto res2 = amplitude_test_ff(fs, cfg);
  CHECK(result_to_json(res2, cfg, ds, 0, 0) == doc);

  // spot-check the schema
  CHECK(doc.find("\"method\"") != std::string::npos);
  CHECK(doc.find("\"statistic\"") != std::string::npos);
  CHECK(doc.find("\"k_star\"") != std::string::npos);
  CHECK(doc.find("\"p_value\"") != std::string::npos);
  CHECK(doc.find("\"decision\"") != std::string::npos);
  CHECK(doc.find("\"lambda2\"") != std::string::npos);
  CHECK(doc.find("\"cusum_trace\"") != std::string::npos);
  CHECK(doc.find("\"mean_before\"") != std::string::npos);
  CHECK(doc.find("\"delta_hat\"") != std::string::npos);
  CHECK(doc.find("\"rng\"") != std::string::npos);

  // decision thresholding
  const bool reject = doc.find("\"decision\": \"reject\"") != std::string::npos;
  CHECK(reject == (res.p_value <= cfg.alpha));

  // k_star_label points at the right input label
  if (res.k_star > 0) {
    const std::string expect =
        "\"k_star_label\": \"" + fs[res.k_star - 1].label + "\"";
    CHECK(doc.find(expect) != std::string::npos);
  }
}

TEST_CASE("plot data files") {
  SimSpec spec;
  spec.n = 8;
  spec.changepoint = 4;
  spec.grid_size = 31;
  spec.rng_seed = 41;
  const auto fs = gen_amplitude_change(spec);
  Dataset ds;
  ds.grid = fs.front().grid;
  ds.functions = fs;

  TestConfig cfg;
  cfg.mc_reps = 199;
  cfg.mc_grid = 201;
  cfg.rng_seed = 41;
  const AlignmentResult ar = karcher_mean_align(fs, cfg.alignment);
  const auto res = amplitude_test_ff(ar, cfg);

  const auto dir = std::filesystem::temp_directory_path() / "efcp_plot_test";
  std::filesystem::remove_all(dir);
  write_plot_data(dir, res, ds, &ar);
  CHECK(std::filesystem::exists(dir / "cusum_trace.csv"));
  CHECK(std::filesystem::exists(dir / "segment_means.csv"));
  CHECK(std::filesystem::exists(dir / "aligned_functions.csv"));
  CHECK(std::filesystem::exists(dir / "warping_functions.csv"));
  CHECK(std::filesystem::exists(dir / "karcher_mean.csv"));

  // the aligned functions file re-ingests
  const Dataset aligned = read_dataset(dir / "aligned_functions.csv");
  CHECK(aligned.functions.size() == 8);
  CHECK(aligned.grid.num_points == 31);

  // warping functions: time column in original units, endpoints pinned
  const Dataset warps = read_dataset(dir / "warping_functions.csv");
  CHECK(warps.functions.size() == 8);
  CHECK(warps.functions[0].values.front() == doctest::Approx(-6.0));
  CHECK(warps.functions[0].values.back() == doctest::Approx(6.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("labels with commas are rejected on write") {
  Dataset ds = sample_dataset(1, 5);
  ds.functions[0].label = "bad,label";
  CHECK_THROWS_AS(dataset_to_csv(ds), invalid_input_error);
}
