#include "efcp/changepoint.hpp"

#include <cmath>

#include <algorithm>
#include <limits>
#include <utility>

#include "efcp/errors.hpp"
#include "efcp/phase.hpp"
#include "efcp/rng.hpp"

namespace efcp {

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw invalid_input_error("alpha must lie in (0, 1)");
  }
  if (mc_reps < 100) {
    throw invalid_input_error("mc_reps must be at least 100");
  }
  if (mc_grid < 101) {
    throw invalid_input_error("mc_grid must be at least 101");
  }
  if (eigen_truncation < 1) {
    throw invalid_input_error("eigen_truncation must be positive");
  }
  if (lambda2_permutations < 0) {
    throw invalid_input_error("lambda2_permutations must be nonnegative");
  }
}

namespace detail {

CusumOutcome cusum_max(const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& weights) {
  const std::size_t n = rows.size();
  const std::size_t m = weights.size();
  CusumOutcome out;
  out.trace.assign(n, 0.0);

  std::vector<double> colsum(m, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < m; ++j) colsum[j] += r[j];
  }
  std::vector<double> run(m, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto& r = rows[k - 1];
    for (std::size_t j = 0; j < m; ++j) run[j] += r[j];
    const double frac = static_cast<double>(k) * inv_n;
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double dev = run[j] - frac * colsum[j];
      s += weights[j] * dev * dev;
    }
    out.trace[k - 1] = s * inv_n;
  }
  out.k_star = 1;
  out.statistic = out.trace[0];
  for (std::size_t k = 2; k <= n; ++k) {
    if (out.trace[k - 1] > out.statistic) {
      out.statistic = out.trace[k - 1];
      out.k_star = k;
    }
  }
  return out;
}

}  // namespace detail

std::uint64_t limit_stream_seed(const TestConfig& cfg) {
  return derive_seed(cfg.rng_seed, 0x4C494D4954ULL);
}

LimitDistribution simulate_limit_sup(const std::vector<double>& eigs,
                                     const TestConfig& cfg) {
  cfg.validate();
  if (eigs.empty()) {
    throw invalid_input_error("simulate_limit_sup: empty eigenvalues");
  }
  std::vector<double> lam;
  for (double l : eigs) {
    if (l < -1e-12 || !std::isfinite(l)) {
      throw invalid_input_error("simulate_limit_sup: eigenvalues must be >= 0");
    }
    lam.push_back(std::max(0.0, l));
    if (static_cast<int>(lam.size()) >= cfg.eigen_truncation) break;
  }

  const int m = cfg.mc_grid - 1;  // intervals
  const double step_sd = std::sqrt(1.0 / static_cast<double>(m));

  const std::uint64_t mc_seed = limit_stream_seed(cfg);
  LimitDistribution dist;
  dist.draws.resize(cfg.mc_reps);

  std::vector<double> w(m + 1), buf(m + 1);
  for (int rep = 0; rep < cfg.mc_reps; ++rep) {
    Rng rng(derive_seed(mc_seed, static_cast<std::uint64_t>(rep)));
    std::fill(buf.begin(), buf.end(), 0.0);
    for (double l : lam) {
      w[0] = 0.0;
      for (int j = 1; j <= m; ++j) w[j] = w[j - 1] + step_sd * rng.normal();
      const double wm = w[m];
      for (int j = 1; j < m; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(m);
        const double b = w[j] - x * wm;
        buf[j] += l * b * b;
      }
    }
    double sup = 0.0;
    for (int j = 1; j < m; ++j) {
      if (buf[j] > sup) sup = buf[j];
    }
    dist.draws[rep] = sup;
  }
  std::sort(dist.draws.begin(), dist.draws.end());
  return dist;
}

double p_value(double statistic, const LimitDistribution& dist) {
  if (dist.draws.empty()) {
    throw invalid_input_error("p_value: empty distribution");
  }
  const auto it =
      std::lower_bound(dist.draws.begin(), dist.draws.end(), statistic);
  const std::size_t count_ge = dist.draws.end() - it;
  return (1.0 + static_cast<double>(count_ge)) /
         (static_cast<double>(dist.draws.size()) + 1.0);
}

namespace {

// Eigenvalues actually fed to the limit simulation: descending, capped at
// eigen_truncation, with numerically-zero tail components dropped (they
// contribute nothing but cost Monte-Carlo time).
std::vector<double> trim_eigs(const std::vector<double>& eigs,
                              const TestConfig& cfg) {
  std::vector<double> out;
  if (eigs.empty()) return out;
  const double floor = std::max(1e-12, 1e-9 * eigs.front());
  for (double l : eigs) {
    if (static_cast<int>(out.size()) >= cfg.eigen_truncation) break;
    if (l <= floor) break;
    out.push_back(l);
  }
  return out;
}

double weighted_total_variance(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& weights,
                               bool center) {
  const std::size_t n = rows.size();
  const std::size_t m = weights.size();
  std::vector<double> mean(m, 0.0);
  if (center) {
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < m; ++j) mean[j] += r[j];
    }
    for (double& v : mean) v /= static_cast<double>(n);
  }
  double total = 0.0;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = r[j] - mean[j];
      total += weights[j] * d * d;
    }
  }
  return total / static_cast<double>(n - 1);
}

std::optional<double> lambda2_permutation_p(
    const std::vector<std::vector<double>>& rows,
    const std::vector<double>& weights, double observed,
    const TestConfig& cfg) {
  if (cfg.lambda2_permutations <= 0) return std::nullopt;
  Rng rng(derive_seed(cfg.rng_seed, 0x5045524DULL));
  std::vector<std::vector<double>> perm = rows;
  int count_ge = 0;
  for (int p = 0; p < cfg.lambda2_permutations; ++p) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(rng.uniform() *
                                               static_cast<double>(i + 1));
      if (j > i) j = i;
      std::swap(perm[i], perm[j]);
    }
    const auto outcome = detail::cusum_max(perm, weights);
    double lam2 = 0.0;
    for (double v : outcome.trace) lam2 += v;
    lam2 /= static_cast<double>(outcome.trace.size());
    if (lam2 >= observed) ++count_ge;
  }
  return (1.0 + count_ge) / (static_cast<double>(cfg.lambda2_permutations) + 1.0);
}

FunctionSample make_sample(const Grid& grid, std::vector<double> values,
                           std::string label) {
  FunctionSample f;
  f.grid = grid;
  f.values = std::move(values);
  f.label = std::move(label);
  return f;
}

// Cross-sectional SRVF mean over rows [lo, hi), mapped back to f-space.
FunctionSample segment_mean_f(const std::vector<SrvfSample>& qs,
                              std::size_t lo, std::size_t hi,
                              const std::string& label) {
  SrvfSample mu;
  mu.grid = qs.front().grid;
  mu.values.assign(mu.grid.num_points, 0.0);
  mu.f0 = 0.0;
  const double inv = 1.0 / static_cast<double>(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    for (std::size_t j = 0; j < mu.values.size(); ++j) {
      mu.values[j] += qs[i].values[j] * inv;
    }
    mu.f0 += qs[i].f0 * inv;
  }
  FunctionSample f = srvf_inverse(mu);
  f.label = label;
  return f;
}

FunctionSample difference(const FunctionSample& a, const FunctionSample& b,
                          const std::string& label) {
  FunctionSample d;
  d.grid = a.grid;
  d.label = label;
  d.values.resize(a.values.size());
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    d.values[j] = a.values[j] - b.values[j];
  }
  return d;
}

ChangepointResult degenerate_result(std::string method, std::size_t n,
                                    FunctionSample overall_mean,
                                    bool alignment_converged) {
  ChangepointResult res;
  res.method = std::move(method);
  res.statistic = 0.0;
  res.k_star = 0;
  res.p_value = 1.0;
  res.lambda2 = 0.0;
  res.cusum_trace.assign(n, 0.0);
  res.mean_before = overall_mean;
  res.mean_before.label = "mean_before";
  res.mean_after = overall_mean;
  res.mean_after.label = "mean_after";
  res.delta_hat = make_sample(
      overall_mean.grid, std::vector<double>(overall_mean.values.size(), 0.0),
      "delta_hat");
  res.degenerate = true;
  res.alignment_converged = alignment_converged;
  return res;
}

// Warp (internal [0,1] values) rendered as a FunctionSample in the original
// domain, so phase-test segment summaries carry interpretable units.
FunctionSample warp_as_function(const Warping& gamma,
                                const std::string& label) {
  FunctionSample f;
  f.grid = gamma.grid;
  f.label = label;
  f.values.resize(gamma.values.size());
  const double lo = gamma.grid.domain_min;
  const double range = gamma.grid.domain_max - gamma.grid.domain_min;
  for (std::size_t j = 0; j < gamma.values.size(); ++j) {
    f.values[j] = lo + range * gamma.values[j];
  }
  return f;
}

void finish_common(ChangepointResult& res, detail::CusumOutcome outcome,
                   const std::vector<double>& eigs_for_limit,
                   const std::vector<std::vector<double>>& rows,
                   const std::vector<double>& weights, const TestConfig& cfg) {
  res.statistic = outcome.statistic;
  res.k_star = outcome.k_star;
  double lam2 = 0.0;
  for (double v : outcome.trace) lam2 += v;
  lam2 /= static_cast<double>(outcome.trace.size());
  res.lambda2 = lam2;
  res.cusum_trace = std::move(outcome.trace);

  const LimitDistribution dist = simulate_limit_sup(eigs_for_limit, cfg);
  res.p_value = p_value(res.statistic, dist);
  res.lambda2_p_value = lambda2_permutation_p(rows, weights, lam2, cfg);
}

ChangepointResult amplitude_ff_from_prefixes(
    const std::vector<SrvfSample>& aligned,
    const std::vector<SrvfSample>& prefixes, bool alignment_converged,
    std::string method, const TestConfig& cfg) {
  const std::size_t n = aligned.size();
  const Grid& grid = aligned.front().grid;
  const std::vector<double> weights =
      quad_weights(grid.num_points, grid.spacing());

  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = aligned[i].values;

  if (weighted_total_variance(rows, weights, true) < 1e-12) {
    FunctionSample overall = segment_mean_f(aligned, 0, n, "mean");
    return degenerate_result(std::move(method), n, std::move(overall),
                             alignment_converged);
  }

  // trace[k-1] = ||(k/sqrt(n)) (mu^k - mu^n)||^2 from the prefix means.
  detail::CusumOutcome outcome;
  outcome.trace.assign(n, 0.0);
  const auto& mu_n = prefixes.back();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> dev(grid.num_points);
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    for (std::size_t j = 0; j < dev.size(); ++j) {
      dev[j] = kk * (prefixes[k - 1].values[j] - mu_n.values[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < dev.size(); ++j) {
      s += weights[j] * dev[j] * dev[j];
    }
    outcome.trace[k - 1] = s * inv_n;
  }
  outcome.k_star = 1;
  outcome.statistic = outcome.trace[0];
  for (std::size_t k = 2; k <= n; ++k) {
    if (outcome.trace[k - 1] > outcome.statistic) {
      outcome.statistic = outcome.trace[k - 1];
      outcome.k_star = k;
    }
  }

  ChangepointResult res;
  res.method = std::move(method);
  res.alignment_converged = alignment_converged;
  const std::vector<double> eigs = covariance_eigenvalues(rows, weights, true);
  finish_common(res, std::move(outcome), trim_eigs(eigs, cfg), rows, weights,
                cfg);

  const std::size_t split = std::min(res.k_star, n - 1);
  res.mean_before = segment_mean_f(aligned, 0, split, "mean_before");
  res.mean_after = segment_mean_f(aligned, split, n, "mean_after");
  res.delta_hat = difference(res.mean_after, res.mean_before, "delta_hat");
  return res;
}

struct PhaseRows {
  PsiSample base;
  std::vector<ShootingVector> vs;
  std::vector<std::vector<double>> rows;
};

PhaseRows phase_rows(const AlignmentResult& ar) {
  PhaseRows out;
  const WarpMeanResult wm = karcher_mean_warps(ar.warps);
  out.base = wm.mean_psi;
  out.vs = shooting_vectors(ar.warps, out.base);
  out.rows.resize(out.vs.size());
  for (std::size_t i = 0; i < out.vs.size(); ++i) {
    out.rows[i] = out.vs[i].values;
  }
  return out;
}

void phase_segment_summaries(ChangepointResult& res, const PhaseRows& pr,
                             std::size_t n) {
  const Grid& grid = pr.base.grid;
  const std::size_t split = std::min(res.k_star, n - 1);
  auto segment_warp = [&](std::size_t lo, std::size_t hi) {
    ShootingVector sv;
    sv.grid = grid;
    sv.base = pr.base;
    sv.values.assign(grid.num_points, 0.0);
    const double inv = 1.0 / static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < sv.values.size(); ++j) {
        sv.values[j] += pr.rows[i][j] * inv;
      }
    }
    return from_psi(exp_map(sv));
  };
  const Warping before = segment_warp(0, split);
  const Warping after = segment_warp(split, n);
  res.mean_before = warp_as_function(before, "mean_warp_before");
  res.mean_after = warp_as_function(after, "mean_warp_after");
  res.delta_hat = difference(res.mean_after, res.mean_before, "delta_hat");
}

}  // namespace

ChangepointResult amplitude_test_ff(const AlignmentResult& ar,
                                    const TestConfig& cfg) {
  cfg.validate();
  if (ar.aligned_q.size() < 4) {
    throw invalid_input_error("changepoint tests need n >= 4");
  }
  return amplitude_ff_from_prefixes(ar.aligned_q, prefix_means(ar),
                                    ar.converged, "elastic-amp", cfg);
}

ChangepointResult phase_test_ff(const AlignmentResult& ar,
                                const TestConfig& cfg) {
  cfg.validate();
  const std::size_t n = ar.warps.size();
  if (n < 4) {
    throw invalid_input_error("changepoint tests need n >= 4");
  }
  PhaseRows pr = phase_rows(ar);
  const std::vector<double> weights =
      quad_weights(pr.base.grid.num_points, pr.base.grid.spacing());

  if (weighted_total_variance(pr.rows, weights, false) < 1e-12) {
    FunctionSample overall =
        warp_as_function(from_psi(pr.base), "mean_warp");
    ChangepointResult res = degenerate_result("elastic-phase", n,
                                              std::move(overall), ar.converged);
    return res;
  }

  ChangepointResult res;
  res.method = "elastic-phase";
  res.alignment_converged = ar.converged;
  detail::CusumOutcome outcome = detail::cusum_max(pr.rows, weights);
  const std::vector<double> eigs =
      covariance_eigenvalues(pr.rows, weights, false);
  finish_common(res, std::move(outcome), trim_eigs(eigs, cfg), pr.rows,
                weights, cfg);
  phase_segment_summaries(res, pr, n);
  return res;
}

namespace {

ChangepointResult pca_test_common(const FpcaResult& fp,
                                  const std::vector<SrvfSample>* aligned_q,
                                  const PhaseRows* pr, bool converged,
                                  std::string method, const TestConfig& cfg) {
  const std::size_t n = fp.scores.size();
  if (fp.eigenvalues.empty() || fp.eigenvalues.front() <= 1e-12) {
    throw degenerate_data_error(method +
                                ": data variance is numerically zero");
  }
  const std::size_t p = fp.eigenvalues.size();
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < p; ++l) {
      rows[i][l] = fp.scores[i][l] / std::sqrt(fp.eigenvalues[l]);
    }
  }
  const std::vector<double> unit_weights(p, 1.0);

  ChangepointResult res;
  res.method = std::move(method);
  res.alignment_converged = converged;
  detail::CusumOutcome outcome = detail::cusum_max(rows, unit_weights);
  const std::vector<double> ones(p, 1.0);
  finish_common(res, std::move(outcome), ones, rows, unit_weights, cfg);

  if (aligned_q != nullptr) {
    const std::size_t split = std::min(res.k_star, n - 1);
    res.mean_before = segment_mean_f(*aligned_q, 0, split, "mean_before");
    res.mean_after = segment_mean_f(*aligned_q, split, n, "mean_after");
    res.delta_hat = difference(res.mean_after, res.mean_before, "delta_hat");
  } else {
    phase_segment_summaries(res, *pr, n);
  }
  return res;
}

}  // namespace

ChangepointResult amplitude_test_pca(const AlignmentResult& ar,
                                     const TestConfig& cfg) {
  cfg.validate();
  if (ar.aligned_q.size() < 4) {
    throw invalid_input_error("changepoint tests need n >= 4");
  }
  const FpcaResult fp = vertical_fpca(ar, cfg.components);
  return pca_test_common(fp, &ar.aligned_q, nullptr, ar.converged,
                         "elastic-amp-pca", cfg);
}

ChangepointResult phase_test_pca(const AlignmentResult& ar,
                                 const TestConfig& cfg) {
  cfg.validate();
  if (ar.warps.size() < 4) {
    throw invalid_input_error("changepoint tests need n >= 4");
  }
  PhaseRows pr = phase_rows(ar);
  const FpcaResult fp = horizontal_fpca(pr.vs, cfg.components, false);
  return pca_test_common(fp, nullptr, &pr, ar.converged, "elastic-phase-pca",
                         cfg);
}

ChangepointResult cross_sectional_test(const std::vector<FunctionSample>& fs,
                                       const TestConfig& cfg) {
  cfg.validate();
  const std::size_t n = fs.size();
  if (n < 4) {
    throw invalid_input_error("changepoint tests need n >= 4");
  }
  const Grid grid = fs.front().grid;
  for (const auto& f : fs) {
    validate(f);
    if (!(f.grid == grid)) {
      throw invalid_input_error("cross_sectional_test requires a shared grid");
    }
  }
  const std::vector<double> weights =
      quad_weights(grid.num_points, grid.spacing());
  std::vector<std::vector<double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = fs[i].values;

  auto raw_mean = [&](std::size_t lo, std::size_t hi,
                      const std::string& label) {
    std::vector<double> mean(grid.num_points, 0.0);
    const double inv = 1.0 / static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < mean.size(); ++j) {
        mean[j] += rows[i][j] * inv;
      }
    }
    return make_sample(grid, std::move(mean), label);
  };

  if (weighted_total_variance(rows, weights, true) < 1e-12) {
    return degenerate_result("cross-sectional", n, raw_mean(0, n, "mean"),
                             true);
  }

  ChangepointResult res;
  res.method = "cross-sectional";
  detail::CusumOutcome outcome = detail::cusum_max(rows, weights);
  const std::vector<double> eigs = covariance_eigenvalues(rows, weights, true);
  finish_common(res, std::move(outcome), trim_eigs(eigs, cfg), rows, weights,
                cfg);
  const std::size_t split = std::min(res.k_star, n - 1);
  res.mean_before = raw_mean(0, split, "mean_before");
  res.mean_after = raw_mean(split, n, "mean_after");
  res.delta_hat = difference(res.mean_after, res.mean_before, "delta_hat");
  return res;
}

namespace {

std::vector<FunctionSample> checked(const std::vector<FunctionSample>& fs) {
  if (fs.size() < 4) {
    throw invalid_input_error("changepoint tests need n >= 4");
  }
  return fs;
}

}  // namespace

ChangepointResult amplitude_test_ff(const std::vector<FunctionSample>& fs,
                                    const TestConfig& cfg) {
  cfg.validate();
  checked(fs);
  AlignmentResult ar = karcher_mean_align(fs, cfg.alignment);
  if (!cfg.per_prefix) return amplitude_test_ff(ar, cfg);

  // Research-fidelity variant: full Karcher re-estimation per prefix.
  const std::size_t n = fs.size();
  std::vector<SrvfSample> prefixes(n);
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<FunctionSample> head(fs.begin(), fs.begin() + k);
    prefixes[k - 1] = karcher_mean_align(head, cfg.alignment).mean_q;
  }
  prefixes[n - 1] = ar.mean_q;
  return amplitude_ff_from_prefixes(ar.aligned_q, prefixes, ar.converged,
                                    "elastic-amp", cfg);
}

ChangepointResult phase_test_ff(const std::vector<FunctionSample>& fs,
                                const TestConfig& cfg) {
  cfg.validate();
  checked(fs);
  AlignmentResult ar = karcher_mean_align(fs, cfg.alignment);
  if (!cfg.per_prefix) return phase_test_ff(ar, cfg);

  // Per-prefix intrinsic means, linearized at the global mean.
  const std::size_t n = ar.warps.size();
  PhaseRows pr = phase_rows(ar);
  const Grid& grid = pr.base.grid;
  const std::vector<double> weights =
      quad_weights(grid.num_points, grid.spacing());
  if (weighted_total_variance(pr.rows, weights, false) < 1e-12) {
    FunctionSample overall = warp_as_function(from_psi(pr.base), "mean_warp");
    return degenerate_result("elastic-phase", n, std::move(overall),
                             ar.converged);
  }

  detail::CusumOutcome outcome;
  outcome.trace.assign(n, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<Warping> head(ar.warps.begin(), ar.warps.begin() + k);
    const WarpMeanResult wk = karcher_mean_warps(head);
    const ShootingVector vk = log_map(wk.mean_psi, pr.base);
    const double kk = static_cast<double>(k);
    double s = 0.0;
    for (std::size_t j = 0; j < vk.values.size(); ++j) {
      const double dev = kk * vk.values[j];
      s += weights[j] * dev * dev;
    }
    outcome.trace[k - 1] = s * inv_n;
  }
  outcome.k_star = 1;
  outcome.statistic = outcome.trace[0];
  for (std::size_t k = 2; k <= n; ++k) {
    if (outcome.trace[k - 1] > outcome.statistic) {
      outcome.statistic = outcome.trace[k - 1];
      outcome.k_star = k;
    }
  }

  ChangepointResult res;
  res.method = "elastic-phase";
  res.alignment_converged = ar.converged;
  const std::vector<double> eigs =
      covariance_eigenvalues(pr.rows, weights, false);
  finish_common(res, std::move(outcome), trim_eigs(eigs, cfg), pr.rows,
                weights, cfg);
  phase_segment_summaries(res, pr, n);
  return res;
}

ChangepointResult amplitude_test_pca(const std::vector<FunctionSample>& fs,
                                     const TestConfig& cfg) {
  cfg.validate();
  checked(fs);
  const AlignmentResult ar = karcher_mean_align(fs, cfg.alignment);
  return amplitude_test_pca(ar, cfg);
}

ChangepointResult phase_test_pca(const std::vector<FunctionSample>& fs,
                                 const TestConfig& cfg) {
  cfg.validate();
  checked(fs);
  const AlignmentResult ar = karcher_mean_align(fs, cfg.alignment);
  return phase_test_pca(ar, cfg);
}

}  // namespace efcp
