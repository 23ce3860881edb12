#include "efcp/karcher.hpp"

#include <cmath>

#include <algorithm>
#include <limits>

#include "efcp/errors.hpp"
#include "efcp/phase.hpp"

namespace efcp {

namespace {

SrvfSample cross_sectional_mean(const std::vector<SrvfSample>& qs) {
  SrvfSample mu;
  mu.grid = qs.front().grid;
  mu.values.assign(mu.grid.num_points, 0.0);
  mu.f0 = 0.0;
  const double inv_n = 1.0 / static_cast<double>(qs.size());
  for (const auto& q : qs) {
    for (std::size_t j = 0; j < mu.values.size(); ++j) {
      mu.values[j] += q.values[j] * inv_n;
    }
    mu.f0 += q.f0 * inv_n;
  }
  return mu;
}

}  // namespace

AlignmentResult karcher_mean_align(const std::vector<FunctionSample>& fs,
                                   const AlignmentConfig& cfg) {
  if (fs.empty()) {
    throw invalid_input_error("karcher_mean_align needs at least one function");
  }
  const Grid grid = fs.front().grid;
  for (const auto& f : fs) {
    validate(f);
    if (!(f.grid == grid)) {
      throw invalid_input_error("karcher_mean_align requires a shared grid");
    }
  }
  const std::size_t n = fs.size();

  std::vector<SrvfSample> qs;
  qs.reserve(n);
  for (const auto& f : fs) qs.push_back(srvf_transform(f));

  AlignmentResult ar;
  if (n == 1) {
    ar.mean_q = qs[0];
    ar.mean_f = srvf_inverse(qs[0]);
    ar.aligned_q = qs;
    ar.warps = {identity_warping(grid)};
    ar.aligned_f = fs;
    ar.iterations = 1;
    ar.converged = true;
    ar.objective_history = {0.0};
    return ar;
  }

  // Seed with the most central sample.
  std::size_t medoid = 0;
  double medoid_obj = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (cfg.init == AlignmentConfig::Init::elastic_medoid) {
        const double d = optimal_warp(qs[i], qs[j]).distance;
        obj += d * d;
      } else {
        const double d = l2_distance(qs[i].values, qs[j].values, grid);
        obj += d * d;
      }
    }
    if (obj < medoid_obj) {
      medoid_obj = obj;
      medoid = i;
    }
  }
  SrvfSample mu = qs[medoid];

  std::vector<Warping> warps(n);
  std::vector<SrvfSample> aligned(n);
  double prev_obj = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iter; ++it) {
    ar.iterations = it;
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      OptimalWarpResult ow = optimal_warp(mu, qs[i]);
      // The registration is approximate: if last iteration's warp still beats
      // the fresh solve against the updated mean, keep it.  Together with the
      // mean update being the exact minimizer, this makes the objective
      // sequence non-increasing.
      const double keep = it > 1
          ? l2_distance(mu.values, aligned[i].values, grid)
          : std::numeric_limits<double>::infinity();
      if (ow.distance < keep) {
        warps[i] = std::move(ow.warp);
        aligned[i] = group_action(qs[i], warps[i]);
        obj += ow.distance * ow.distance;
      } else {
        obj += keep * keep;
      }
    }
    ar.objective_history.push_back(obj);
    mu = cross_sectional_mean(aligned);
    if (obj == 0.0 ||
        (prev_obj != std::numeric_limits<double>::infinity() &&
         prev_obj - obj <= cfg.tol * std::max(prev_obj, 1e-12))) {
      ar.converged = true;
      prev_obj = obj;
      break;
    }
    prev_obj = obj;
  }

  if (cfg.center_warps) {
    // Identifiability: make the average phase the identity.
    const WarpMeanResult wm = karcher_mean_warps(warps);
    const Warping inv = invert_warp(wm.mean_warp);
    for (std::size_t i = 0; i < n; ++i) {
      warps[i] = compose(warps[i], inv);
      aligned[i] = group_action(qs[i], warps[i]);
    }
    mu = cross_sectional_mean(aligned);
  }

  ar.mean_q = std::move(mu);
  ar.mean_f = srvf_inverse(ar.mean_q);
  ar.aligned_q = std::move(aligned);
  ar.warps = std::move(warps);
  ar.aligned_f.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ar.aligned_f[i] = warp_function(fs[i], ar.warps[i]);
  }
  return ar;
}

std::vector<SrvfSample> prefix_means(const AlignmentResult& ar) {
  if (ar.aligned_q.empty()) {
    throw invalid_input_error("prefix_means needs a nonempty alignment");
  }
  const std::size_t n = ar.aligned_q.size();
  const std::size_t t = ar.aligned_q.front().values.size();
  std::vector<SrvfSample> out(n);
  std::vector<double> run(t, 0.0);
  double run_f0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < t; ++j) run[j] += ar.aligned_q[k].values[j];
    run_f0 += ar.aligned_q[k].f0;
    out[k].grid = ar.aligned_q[k].grid;
    out[k].values.resize(t);
    const double inv = 1.0 / static_cast<double>(k + 1);
    for (std::size_t j = 0; j < t; ++j) out[k].values[j] = run[j] * inv;
    out[k].f0 = run_f0 * inv;
  }
  return out;
}

}  // namespace efcp
