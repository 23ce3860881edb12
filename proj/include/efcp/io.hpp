#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "efcp/changepoint.hpp"
#include "efcp/function.hpp"
#include "efcp/karcher.hpp"

namespace efcp {

struct Dataset {
  Grid grid;
  std::vector<FunctionSample> functions;
};

// Shortest decimal representation that round-trips exactly.
std::string format_double(double x);

// CSV layout: header `t,label1,label2,...`; the time column carries the
// original domain, values are normalized onto [0,1] internally on ingest.
std::string dataset_to_csv(const Dataset& ds);
Dataset dataset_from_csv(const std::string& text);

std::string dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const std::string& text);

// Dispatches on the file extension (.json -> JSON, anything else -> CSV).
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const Dataset& ds);

// JSON result document; `smooth_window`/`smooth_passes` echo the
// preprocessing actually applied (0 = none).
std::string result_to_json(const ChangepointResult& res, const TestConfig& cfg,
                           const Dataset& input, std::size_t smooth_window,
                           std::size_t smooth_passes);

// Plot-ready CSVs: cusum trace, segment means, and (when an alignment is
// available) aligned functions and warps.
void write_plot_data(const std::filesystem::path& dir,
                     const ChangepointResult& res, const Dataset& input,
                     const AlignmentResult* alignment);

// aligned_functions.csv, warping_functions.csv (original-domain values), and
// karcher_mean.csv.
void write_alignment_files(const std::filesystem::path& dir,
                           const AlignmentResult& ar, const Dataset& input);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace efcp
