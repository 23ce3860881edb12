#pragma once

#include <cstddef>
#include <cstdint>

#include <optional>
#include <string>
#include <vector>

#include "efcp/fpca.hpp"
#include "efcp/function.hpp"
#include "efcp/karcher.hpp"

namespace efcp {

struct TestConfig {
  double alpha = 0.05;
  int mc_reps = 10000;
  int mc_grid = 1001;
  ComponentSelector components{};  // PCA tests (default: 95% cumulative)
  int eigen_truncation = 50;       // limit-law sum truncation
  std::uint64_t rng_seed = 0;
  // Research-fidelity variant: re-estimate the Karcher mean per prefix
  // instead of reusing the global alignment.  Expensive; off by default.
  bool per_prefix = false;
  AlignmentConfig alignment{};
  // Optional permutation p-value for the companion statistic lambda2
  // (0 disables it).  Not part of the limit-law methodology.
  int lambda2_permutations = 0;

  void validate() const;
};

struct ChangepointResult {
  std::string method;
  double statistic = 0.0;
  std::size_t k_star = 0;    // 1-based last pre-change index; 0 if degenerate
  double p_value = 1.0;
  double lambda2 = 0.0;
  std::optional<double> lambda2_p_value;
  std::vector<double> cusum_trace;  // ||S_{n,k}||^2 (or T_N(k/N)), k = 1..n
  // Segment summaries: function-space means for amplitude/cross-sectional
  // methods, warps stored as FunctionSamples for the phase methods.
  FunctionSample mean_before;
  FunctionSample mean_after;
  FunctionSample delta_hat;
  bool degenerate = false;
  bool alignment_converged = true;
};

// Sorted draws from the Monte-Carlo limit distribution.
struct LimitDistribution {
  std::vector<double> draws;
};

// sup_x sum_l eigs[l] * B_l(x)^2 over mc_reps Brownian-bridge replicates.
LimitDistribution simulate_limit_sup(const std::vector<double>& eigs,
                                     const TestConfig& cfg);

// Seed of the limit-law Monte-Carlo stream: derived from cfg.rng_seed but
// independent of every data-generation stream.
std::uint64_t limit_stream_seed(const TestConfig& cfg);

double p_value(double statistic, const LimitDistribution& dist);

// Fully-functional tests (T_n = max_k ||S_{n,k}||^2).
ChangepointResult amplitude_test_ff(const std::vector<FunctionSample>& fs,
                                    const TestConfig& cfg);
ChangepointResult phase_test_ff(const std::vector<FunctionSample>& fs,
                                const TestConfig& cfg);

// fPCA score tests (sup_x T_N(x)).
ChangepointResult amplitude_test_pca(const std::vector<FunctionSample>& fs,
                                     const TestConfig& cfg);
ChangepointResult phase_test_pca(const std::vector<FunctionSample>& fs,
                                 const TestConfig& cfg);

// Baseline on raw function values, no alignment.
ChangepointResult cross_sectional_test(const std::vector<FunctionSample>& fs,
                                       const TestConfig& cfg);

// Variants reusing one shared alignment (the four elastic tests on a common
// dataset only need karcher_mean_align once).  These always use the
// global-alignment prefix scheme.
ChangepointResult amplitude_test_ff(const AlignmentResult& ar,
                                    const TestConfig& cfg);
ChangepointResult phase_test_ff(const AlignmentResult& ar,
                                const TestConfig& cfg);
ChangepointResult amplitude_test_pca(const AlignmentResult& ar,
                                     const TestConfig& cfg);
ChangepointResult phase_test_pca(const AlignmentResult& ar,
                                 const TestConfig& cfg);

namespace detail {

// CUSUM of rows r_i: trace[k-1] = ||(1/sqrt(n)) (sum_{i<=k} r_i
// - (k/n) sum_i r_i)||_w^2; statistic = max; k_star = first argmax (1-based).
struct CusumOutcome {
  std::vector<double> trace;
  double statistic = 0.0;
  std::size_t k_star = 0;
};
CusumOutcome cusum_max(const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& weights);

}  // namespace detail

}  // namespace efcp
