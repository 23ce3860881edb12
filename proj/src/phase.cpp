#include "efcp/phase.hpp"

#include <cmath>

#include <algorithm>
#include <limits>

#include "efcp/errors.hpp"

namespace efcp {

namespace {

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

void renormalize(std::vector<double>& v, const Grid& grid) {
  const double nrm = l2_norm(v, grid);
  if (nrm <= 0.0) {
    throw numerical_error("cannot normalize a zero psi sample");
  }
  for (double& x : v) x /= nrm;
}

}  // namespace

void validate(const PsiSample& psi) {
  validate(psi.grid);
  if (psi.values.size() != psi.grid.num_points) {
    throw invalid_input_error("psi size does not match its grid");
  }
  const double nrm2 = l2_inner(psi.values, psi.values, psi.grid);
  if (std::fabs(nrm2 - 1.0) > 1e-6) {
    throw invalid_input_error("psi must have unit norm");
  }
  for (double x : psi.values) {
    if (x < -1e-9 || !std::isfinite(x)) {
      throw invalid_input_error("psi values must be nonnegative");
    }
  }
}

void validate(const ShootingVector& v) {
  validate(v.grid);
  validate(v.base);
  if (v.values.size() != v.grid.num_points) {
    throw invalid_input_error("shooting vector size does not match its grid");
  }
  if (std::fabs(l2_inner(v.values, v.base.values, v.grid)) > 1e-6) {
    throw invalid_input_error("shooting vector must be tangent to its base");
  }
}

PsiSample to_psi(const Warping& gamma) {
  validate(gamma);
  const auto gd = derivative(gamma.values, gamma.grid.spacing());
  PsiSample psi;
  psi.grid = gamma.grid;
  psi.values.resize(gd.size());
  for (std::size_t j = 0; j < gd.size(); ++j) {
    psi.values[j] = std::sqrt(std::max(0.0, gd[j]));
  }
  renormalize(psi.values, psi.grid);
  return psi;
}

Warping from_psi(const PsiSample& psi) {
  std::vector<double> sq(psi.values.size());
  for (std::size_t j = 0; j < sq.size(); ++j) {
    sq[j] = psi.values[j] * psi.values[j];
  }
  Warping gamma;
  gamma.grid = psi.grid;
  gamma.values = cumtrapz(sq, psi.grid.spacing());
  const double total = gamma.values.back();
  if (total <= 0.0) {
    throw numerical_error("psi integrates to a degenerate warp");
  }
  for (double& x : gamma.values) x /= total;
  gamma.values.front() = 0.0;
  gamma.values.back() = 1.0;
  return repair_monotone(std::move(gamma));
}

double psi_distance(const PsiSample& a, const PsiSample& b) {
  return std::acos(clamp_unit(l2_inner(a.values, b.values, a.grid)));
}

double phase_distance(const Warping& g1, const Warping& g2) {
  return psi_distance(to_psi(g1), to_psi(g2));
}

PsiSample exp_map(const ShootingVector& v) {
  const double theta = l2_norm(v.values, v.grid);
  PsiSample out;
  out.grid = v.grid;
  if (theta < 1e-12) {
    out.values = v.base.values;
    return out;
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta) / theta;
  out.values.resize(v.values.size());
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    out.values[j] = c * v.base.values[j] + s * v.values[j];
  }
  renormalize(out.values, out.grid);
  return out;
}

ShootingVector log_map(const PsiSample& psi1, const PsiSample& base) {
  if (psi1.values.size() != base.values.size()) {
    throw invalid_input_error("log_map: psi sizes must match");
  }
  const double theta = psi_distance(psi1, base);
  if (theta >= 3.14159265358979323846 - 1e-6) {
    throw numerical_error("log_map: antipodal inputs");
  }
  ShootingVector v;
  v.grid = base.grid;
  v.base = base;
  v.values.resize(base.values.size());
  if (theta < 1e-8) {
    // Small-angle limit of (theta/sin theta)(psi1 - cos(theta) psi).
    for (std::size_t j = 0; j < v.values.size(); ++j) {
      v.values[j] = psi1.values[j] - base.values[j];
    }
    return v;
  }
  const double c = std::cos(theta);
  const double scale = theta / std::sin(theta);
  for (std::size_t j = 0; j < v.values.size(); ++j) {
    v.values[j] = scale * (psi1.values[j] - c * base.values[j]);
  }
  return v;
}

WarpMeanResult karcher_mean_warps(const std::vector<Warping>& gs, double tol,
                                  int max_iter) {
  if (gs.empty()) {
    throw invalid_input_error("karcher_mean_warps needs at least one warp");
  }
  const std::size_t n = gs.size();
  std::vector<PsiSample> psis;
  psis.reserve(n);
  for (const auto& g : gs) psis.push_back(to_psi(g));

  WarpMeanResult res;
  if (n == 1) {
    res.mean_psi = psis[0];
    res.mean_warp = gs[0];
    res.iterations = 1;
    res.converged = true;
    res.objective_history = {0.0};
    return res;
  }

  auto objective = [&](const PsiSample& mu) {
    double s = 0.0;
    for (const auto& p : psis) {
      const double d = psi_distance(p, mu);
      s += d * d;
    }
    return s;
  };

  // Start from the sample member with minimal summed squared distance.
  std::size_t best_idx = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double obj = objective(psis[i]);
    if (obj < best_obj) {
      best_obj = obj;
      best_idx = i;
    }
  }
  PsiSample mu = psis[best_idx];
  double obj = best_obj;
  res.objective_history.push_back(obj);
  bool moved = false;

  std::vector<double> vbar(mu.values.size());
  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    std::fill(vbar.begin(), vbar.end(), 0.0);
    for (const auto& p : psis) {
      const ShootingVector v = log_map(p, mu);
      for (std::size_t j = 0; j < vbar.size(); ++j) {
        vbar[j] += v.values[j] / static_cast<double>(n);
      }
    }
    if (l2_norm(vbar, mu.grid) < tol) {
      res.converged = true;
      break;
    }
    double step = 0.5;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 30; ++backtrack) {
      ShootingVector sv;
      sv.grid = mu.grid;
      sv.base = mu;
      sv.values.resize(vbar.size());
      for (std::size_t j = 0; j < vbar.size(); ++j) {
        sv.values[j] = step * vbar[j];
      }
      PsiSample cand = exp_map(sv);
      for (double& x : cand.values) x = std::max(0.0, x);
      renormalize(cand.values, cand.grid);
      const double cand_obj = objective(cand);
      if (cand_obj <= obj) {
        mu = std::move(cand);
        obj = cand_obj;
        accepted = true;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    res.objective_history.push_back(obj);
    if (!accepted) {
      res.converged = true;  // no descent direction left at float resolution
      break;
    }
  }

  res.mean_psi = mu;
  // If the iteration never left its starting sample, hand back that warp
  // verbatim rather than a from_psi round-trip of it.
  res.mean_warp = moved ? from_psi(mu) : gs[best_idx];
  return res;
}

std::vector<ShootingVector> shooting_vectors(const std::vector<Warping>& gs,
                                             const PsiSample& base) {
  validate(base);
  std::vector<ShootingVector> vs;
  vs.reserve(gs.size());
  for (const auto& g : gs) {
    vs.push_back(log_map(to_psi(g), base));
  }
  return vs;
}

}  // namespace efcp
