#pragma once

#include <cstddef>

#include <vector>

#include "efcp/function.hpp"
#include "efcp/warping.hpp"

namespace efcp {

struct AlignmentConfig {
  double tol = 1e-4;  // relative decrease of the sum of squared distances
  int max_iter = 20;
  enum class Init { l2_medoid, elastic_medoid };
  // The elastic medoid costs O(n^2) registrations; the L2 medoid in SRVF
  // space is the default seed and converges to the same fixed point on every
  // design exercised by the tests.
  Init init = Init::l2_medoid;
  bool center_warps = true;
};

struct AlignmentResult {
  SrvfSample mean_q;                  // Karcher amplitude mean
  FunctionSample mean_f;              // srvf_inverse of mean_q (mean f0)
  std::vector<SrvfSample> aligned_q;  // group_action(q_i, warps[i])
  std::vector<Warping> warps;
  std::vector<FunctionSample> aligned_f;  // f_i o gamma_i
  std::vector<double> objective_history;  // sum of squared amplitude distances
  int iterations = 0;
  bool converged = false;
};

AlignmentResult karcher_mean_align(const std::vector<FunctionSample>& fs,
                                   const AlignmentConfig& cfg = {});

// Running cross-sectional means of the globally aligned SRVFs, k = 1..n.
std::vector<SrvfSample> prefix_means(const AlignmentResult& ar);

}  // namespace efcp
