#include "efcp/warping.hpp"

#include <cmath>
#include <cstdint>

#include <algorithm>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>

#include "efcp/errors.hpp"

namespace efcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Warping resample_warp(const Warping& gamma, std::size_t new_num_points) {
  Warping out;
  out.grid = Grid{new_num_points, gamma.grid.domain_min, gamma.grid.domain_max};
  out.values.resize(new_num_points);
  for (std::size_t j = 0; j < new_num_points; ++j) {
    out.values[j] = interp_uniform(gamma.values, out.grid.t(j));
  }
  out.values.front() = 0.0;
  out.values.back() = 1.0;
  return out;
}

}  // namespace

Warping identity_warping(const Grid& grid) {
  validate(grid);
  Warping g;
  g.grid = grid;
  g.values.resize(grid.num_points);
  for (std::size_t j = 0; j < grid.num_points; ++j) g.values[j] = grid.t(j);
  g.values.back() = 1.0;
  return g;
}

void validate(const Warping& gamma) {
  validate(gamma.grid);
  if (gamma.values.size() != gamma.grid.num_points) {
    throw invalid_input_error("warping size does not match its grid");
  }
  if (gamma.values.front() != 0.0 || gamma.values.back() != 1.0) {
    throw invalid_input_error("warping must satisfy gamma(0)=0, gamma(1)=1");
  }
  for (std::size_t j = 1; j < gamma.values.size(); ++j) {
    if (!(gamma.values[j] > gamma.values[j - 1])) {
      throw invalid_input_error("warping must be strictly increasing");
    }
  }
}

Warping repair_monotone(Warping gamma, double epsilon) {
  auto& v = gamma.values;
  if (v.empty()) return gamma;
  v.front() = 0.0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (v[j] <= v[j - 1]) v[j] = v[j - 1] + epsilon;
  }
  const double scale = v.back();
  if (scale > 0.0 && scale != 1.0) {
    for (double& x : v) x /= scale;
  }
  v.front() = 0.0;
  v.back() = 1.0;
  return gamma;
}

SrvfSample group_action(const SrvfSample& q, const Warping& gamma_in) {
  validate(q);
  const Warping* gamma = &gamma_in;
  Warping resampled;
  if (gamma_in.values.size() != q.grid.num_points) {
    resampled = resample_warp(gamma_in, q.grid.num_points);
    gamma = &resampled;
  }
  validate(*gamma);
  const double h = q.grid.spacing();
  const auto gd = derivative(gamma->values, h);
  SrvfSample out;
  out.grid = q.grid;
  out.f0 = q.f0;
  out.values.resize(q.values.size());
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const double slope = std::max(0.0, gd[j]);
    out.values[j] =
        interp_uniform(q.values, gamma->values[j]) * std::sqrt(slope);
  }
  return out;
}

FunctionSample warp_function(const FunctionSample& f, const Warping& gamma_in) {
  validate(f);
  const Warping* gamma = &gamma_in;
  Warping resampled;
  if (gamma_in.values.size() != f.grid.num_points) {
    resampled = resample_warp(gamma_in, f.grid.num_points);
    gamma = &resampled;
  }
  validate(*gamma);
  FunctionSample out;
  out.grid = f.grid;
  out.label = f.label;
  out.values.resize(f.values.size());
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    out.values[j] = interp_uniform(f.values, gamma->values[j]);
  }
  return out;
}

Warping invert_warp(const Warping& gamma) {
  validate(gamma);
  const std::size_t n = gamma.values.size();
  Warping out;
  out.grid = gamma.grid;
  out.values.resize(n);
  // gamma is strictly increasing, so gamma^{-1}(t) interpolates the swapped
  // (gamma(t_j), t_j) pairs.
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = gamma.grid.t(j);
    while (k + 2 < n && gamma.values[k + 1] < t) ++k;
    const double g0 = gamma.values[k];
    const double g1 = gamma.values[k + 1];
    const double frac = (t - g0) / (g1 - g0);
    out.values[j] =
        (static_cast<double>(k) + frac) / static_cast<double>(n - 1);
  }
  out.values.front() = 0.0;
  out.values.back() = 1.0;
  return repair_monotone(std::move(out));
}

Warping compose(const Warping& g1, const Warping& g2) {
  validate(g1);
  validate(g2);
  Warping out;
  out.grid = g2.grid;
  out.values.resize(g2.values.size());
  for (std::size_t j = 0; j < g2.values.size(); ++j) {
    out.values[j] = interp_uniform(g1.values, g2.values[j]);
  }
  out.values.front() = 0.0;
  out.values.back() = 1.0;
  return repair_monotone(std::move(out));
}

namespace reg {

const std::vector<Step>& lattice_steps() {
  static const std::vector<Step> steps = [] {
    std::vector<Step> s;
    for (int di = 1; di <= 7; ++di) {
      for (int dj = 1; dj <= 7; ++dj) {
        if (std::gcd(di, dj) == 1) s.push_back({di, dj});
      }
    }
    return s;
  }();
  return steps;
}

namespace {

// Per-step interpolation layout: sample offsets and fractions of the
// straight lattice segment, shared by the table builder and the
// compute-on-demand path so both produce identical doubles.
struct StepPlan {
  int di;
  int dj;
  double sqrt_slope;
  int off[8];
  double frac[8];
  double weight[8];
};

std::vector<StepPlan> build_plans() {
  std::vector<StepPlan> plans;
  for (const Step& st : lattice_steps()) {
    StepPlan p{};
    p.di = st.di;
    p.dj = st.dj;
    p.sqrt_slope =
        std::sqrt(static_cast<double>(st.dj) / static_cast<double>(st.di));
    for (int r = 0; r <= st.di; ++r) {
      const int num = r * st.dj;
      p.off[r] = num / st.di;
      p.frac[r] = static_cast<double>(num - p.off[r] * st.di) /
                  static_cast<double>(st.di);
      p.weight[r] = (r == 0 || r == st.di) ? 0.5 : 1.0;
    }
    plans.push_back(p);
  }
  return plans;
}

const std::vector<StepPlan>& step_plans() {
  static const std::vector<StepPlan> plans = build_plans();
  return plans;
}

// Local energy of the lattice segment (i0,j0) -> (i0+di, j0+dj).  q2 must be
// padded with one trailing element so the frac=0 endpoint read stays in
// bounds.
inline double segment_cost(const double* q1, const double* q2_padded, double h,
                           const StepPlan& p, int i0, int j0) {
  double sum = 0.0;
  for (int r = 0; r <= p.di; ++r) {
    const double b0 = q2_padded[j0 + p.off[r]];
    const double b = b0 + p.frac[r] * (q2_padded[j0 + p.off[r] + 1] - b0);
    const double d = q1[i0 + r] - p.sqrt_slope * b;
    sum += p.weight[r] * d * d;
  }
  return sum * h;
}

constexpr int kEdgeTableMaxT = 300;

}  // namespace

EdgeCostTable::EdgeCostTable(const std::vector<double>& q1,
                             const std::vector<double>& q2, double h)
    : t_(q1.size()), num_steps_(lattice_steps().size()) {
  std::vector<double> q2p(q2);
  q2p.push_back(q2.back());
  costs_.assign(t_ * t_ * num_steps_, kInf);
  const int t = static_cast<int>(t_);
  const auto& plans = step_plans();
  for (std::size_t s = 0; s < plans.size(); ++s) {
    const StepPlan& p = plans[s];
    for (int i0 = 0; i0 + p.di <= t - 1; ++i0) {
      double* row = costs_.data() +
                    (static_cast<std::size_t>(i0) * t_) * num_steps_ + s;
      for (int j0 = 0; j0 + p.dj <= t - 1; ++j0) {
        row[static_cast<std::size_t>(j0) * num_steps_] =
            segment_cost(q1.data(), q2p.data(), h, p, i0, j0);
      }
    }
  }
}

namespace {

struct DpCore {
  std::vector<double> dp;
  std::vector<std::int8_t> parent;
};

DpCore run_dp(const std::vector<double>& q1, const std::vector<double>& q2,
              double h) {
  const int t = static_cast<int>(q1.size());
  const auto& plans = step_plans();
  const int ns = static_cast<int>(plans.size());

  DpCore core;
  core.dp.assign(static_cast<std::size_t>(t) * t, kInf);
  core.parent.assign(static_cast<std::size_t>(t) * t, -1);
  core.dp[0] = 0.0;

  const bool use_table = t <= kEdgeTableMaxT;
  std::unique_ptr<EdgeCostTable> table;
  std::vector<double> q2p;
  if (use_table) {
    table = std::make_unique<EdgeCostTable>(q1, q2, h);
  } else {
    q2p = q2;
    q2p.push_back(q2.back());
  }

  for (int i1 = 1; i1 < t; ++i1) {
    for (int j1 = 1; j1 < t; ++j1) {
      double best = kInf;
      int best_s = -1;
      for (int s = 0; s < ns; ++s) {
        const StepPlan& p = plans[s];
        const int i0 = i1 - p.di;
        const int j0 = j1 - p.dj;
        if (i0 < 0 || j0 < 0) continue;
        const double base = core.dp[static_cast<std::size_t>(i0) * t + j0];
        if (base == kInf) continue;
        const double c =
            base + (use_table
                        ? table->cost(i0, j0, s)
                        : segment_cost(q1.data(), q2p.data(), h, p, i0, j0));
        if (c < best) {
          best = c;
          best_s = s;
        }
      }
      core.dp[static_cast<std::size_t>(i1) * t + j1] = best;
      core.parent[static_cast<std::size_t>(i1) * t + j1] =
          static_cast<std::int8_t>(best_s);
    }
  }
  return core;
}

}  // namespace

DpResult dp_register(const std::vector<double>& q1,
                     const std::vector<double>& q2, const Grid& grid) {
  if (q1.size() != q2.size() || q1.size() != grid.num_points) {
    throw invalid_input_error("dp_register: SRVF sizes must match the grid");
  }
  validate(grid);
  const int t = static_cast<int>(q1.size());
  DpCore core = run_dp(q1, q2, grid.spacing());

  DpResult res;
  res.energy = core.dp[static_cast<std::size_t>(t) * t - 1];

  // Backtrack the lattice path, then fill gamma on every grid index by
  // linear interpolation along each segment.
  const auto& plans = step_plans();
  std::vector<std::pair<int, int>> path;
  int i = t - 1;
  int j = t - 1;
  path.emplace_back(i, j);
  while (i != 0 || j != 0) {
    const int s = core.parent[static_cast<std::size_t>(i) * t + j];
    if (s < 0) throw numerical_error("dp_register: broken backtrack");
    i -= plans[s].di;
    j -= plans[s].dj;
    path.emplace_back(i, j);
  }
  std::reverse(path.begin(), path.end());

  Warping gamma;
  gamma.grid = grid;
  gamma.values.assign(grid.num_points, 0.0);
  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const auto [ia, ja] = path[seg];
    const auto [ib, jb] = path[seg + 1];
    for (int ii = ia; ii <= ib; ++ii) {
      const double lattice_j =
          ja + static_cast<double>(jb - ja) * (ii - ia) / (ib - ia);
      gamma.values[ii] = lattice_j / static_cast<double>(t - 1);
    }
  }
  gamma.values.front() = 0.0;
  gamma.values.back() = 1.0;
  res.warp = repair_monotone(std::move(gamma));
  return res;
}

namespace {

void exhaustive_dfs(const EdgeCostTable& table, int t, int i, int j,
                    double acc, double& best) {
  // Edge costs are nonnegative, so partial sums only grow (monotone under
  // rounding too); cutting at `best` cannot change the minimum.
  if (acc >= best) return;
  if (i == t - 1 && j == t - 1) {
    best = acc;
    return;
  }
  const auto& steps = lattice_steps();
  for (int s = 0; s < static_cast<int>(steps.size()); ++s) {
    const int i1 = i + steps[s].di;
    const int j1 = j + steps[s].dj;
    if (i1 > t - 1 || j1 > t - 1) continue;
    exhaustive_dfs(table, t, i1, j1, acc + table.cost(i, j, s), best);
  }
}

}  // namespace

double exhaustive_min_energy(const std::vector<double>& q1,
                             const std::vector<double>& q2, const Grid& grid) {
  if (q1.size() != q2.size() || q1.size() != grid.num_points) {
    throw invalid_input_error("exhaustive search: size mismatch");
  }
  if (q1.size() > 20) {
    throw invalid_input_error("exhaustive search is only feasible for T <= 20");
  }
  EdgeCostTable table(q1, q2, grid.spacing());
  double best = kInf;
  exhaustive_dfs(table, static_cast<int>(q1.size()), 0, 0, 0.0, best);
  return best;
}

}  // namespace reg

namespace {

// The DP path pins gamma to integer lattice crossings, which costs O(h) in
// warp resolution.  A few golden-section sweeps over the interior node values
// recover the sub-cell optimum of the same energy the caller will see through
// group_action: interp at gamma(t_j) times sqrt of the centered-difference
// slope, trapezoid-weighted.  Deterministic and monotone in that energy.
class WarpRefiner {
 public:
  WarpRefiner(const SrvfSample& q1, const SrvfSample& q2, Warping gamma)
      : q1_(q1), q2_(q2), gamma_(std::move(gamma)) {
    inv2h_ = 1.0 / (2.0 * q1.grid.spacing());
  }

  Warping run(int sweeps) {
    auto& g = gamma_.values;
    const std::size_t t = g.size();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      bool improved = false;
      for (std::size_t j = 1; j + 1 < t; ++j) {
        improved |= relax_node(j);
      }
      if (!improved) break;
    }
    return std::move(gamma_);
  }

 private:
  double slope_at(std::size_t k) const {
    const auto& g = gamma_.values;
    const std::size_t t = g.size();
    if (k == 0) return (-3.0 * g[0] + 4.0 * g[1] - g[2]) * inv2h_;
    if (k + 1 == t) return (3.0 * g[t - 1] - 4.0 * g[t - 2] + g[t - 3]) * inv2h_;
    return (g[k + 1] - g[k - 1]) * inv2h_;
  }

  double term(std::size_t k) const {
    const double s = std::max(0.0, slope_at(k));
    const double w = interp_uniform(q2_.values, gamma_.values[k]) * std::sqrt(s);
    const double d = q1_.values[k] - w;
    const double hw = (k == 0 || k + 1 == gamma_.values.size()) ? 0.5 : 1.0;
    return hw * d * d;
  }

  // Moving node j touches terms j-1, j, j+1, plus the one-sided endpoint
  // slopes when j is within two nodes of either boundary.
  double local_energy(std::size_t j) const {
    const std::size_t t = gamma_.values.size();
    double e = 0.0;
    if (j == 2) e += term(0);
    e += term(j - 1) + term(j) + term(j + 1);
    if (j + 3 == t) e += term(t - 1);
    return e;
  }

  bool relax_node(std::size_t j) {
    auto& g = gamma_.values;
    const double lo_bound = g[j - 1];
    const double hi_bound = g[j + 1];
    const double span = hi_bound - lo_bound;
    if (!(span > 0.0)) return false;
    // keep the margin representable even when the neighbors are only an
    // epsilon apart, so strict monotonicity survives the assignment
    const double margin = 1e-7 * span + 1e-15;
    const double lo = lo_bound + margin;
    const double hi = hi_bound - margin;
    if (!(lo > lo_bound && hi < hi_bound && hi > lo)) return false;

    const double orig = g[j];
    double best_x = orig;
    double best_e = local_energy(j);
    auto eval = [&](double x) {
      g[j] = x;
      const double e = local_energy(j);
      if (e < best_e) {
        best_e = e;
        best_x = x;
      }
      return e;
    };

    // Coarse scan to bracket, then golden-section inside the best cell.
    constexpr int kScan = 8;
    double se[kScan + 1];
    for (int r = 0; r <= kScan; ++r) {
      se[r] = eval(lo + (hi - lo) * r / kScan);
    }
    int rb = 0;
    for (int r = 1; r <= kScan; ++r) {
      if (se[r] < se[rb]) rb = r;
    }
    double a = lo + (hi - lo) * std::max(0, rb - 1) / kScan;
    double b = lo + (hi - lo) * std::min(kScan, rb + 1) / kScan;
    constexpr double kGolden = 0.61803398874989484820;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double e1 = eval(x1);
    double e2 = eval(x2);
    for (int it = 0; it < 24; ++it) {
      if (e1 <= e2) {
        b = x2;
        x2 = x1;
        e2 = e1;
        x1 = b - kGolden * (b - a);
        e1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        e1 = e2;
        x2 = a + kGolden * (b - a);
        e2 = eval(x2);
      }
    }
    if (!(best_x > lo_bound && best_x < hi_bound)) best_x = orig;
    g[j] = best_x;
    return best_x != orig;
  }

  const SrvfSample& q1_;
  const SrvfSample& q2_;
  Warping gamma_;
  double inv2h_;
};

}  // namespace

OptimalWarpResult optimal_warp(const SrvfSample& q1, const SrvfSample& q2) {
  validate(q1);
  validate(q2);
  if (q1.values.size() != q2.values.size()) {
    throw invalid_input_error("optimal_warp requires equal grid sizes");
  }
  OptimalWarpResult res;
  const double ident_dist = l2_distance(q1.values, q2.values, q1.grid);
  const double n1 = l2_norm(q1.values, q1.grid);
  const double n2 = l2_norm(q2.values, q2.grid);
  if (n1 <= 1e-14 && n2 <= 1e-14) {
    res.warp = identity_warping(q1.grid);
    res.distance = 0.0;
    res.dp_energy = 0.0;
    return res;
  }
  reg::DpResult dp = reg::dp_register(q1.values, q2.values, q1.grid);
  dp.warp = WarpRefiner(q1, q2, std::move(dp.warp)).run(6);
  const SrvfSample warped = group_action(q2, dp.warp);
  const double dist = l2_distance(q1.values, warped.values, q1.grid);
  res.dp_energy = dp.energy;
  // The reconstructed warp is re-evaluated through the group action; fall
  // back to the identity if interpolation noise ever makes it worse.
  if (dist <= ident_dist) {
    res.warp = std::move(dp.warp);
    res.distance = dist;
  } else {
    res.warp = identity_warping(q1.grid);
    res.distance = ident_dist;
  }
  return res;
}

double amplitude_distance(const FunctionSample& f1, const FunctionSample& f2) {
  const SrvfSample q1 = srvf_transform(f1);
  const SrvfSample q2 = srvf_transform(f2);
  const double d12 = optimal_warp(q1, q2).distance;
  const double d21 = optimal_warp(q2, q1).distance;
  return std::min(d12, d21);
}

}  // namespace efcp
