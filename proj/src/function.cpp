#include "efcp/function.hpp"

#include <cmath>

#include <algorithm>

#include "efcp/errors.hpp"

namespace efcp {

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

void validate(const Grid& grid) {
  if (grid.num_points < 3) {
    throw invalid_input_error("grid needs at least 3 points, got " +
                              std::to_string(grid.num_points));
  }
  if (!std::isfinite(grid.domain_min) || !std::isfinite(grid.domain_max) ||
      !(grid.domain_min < grid.domain_max)) {
    throw invalid_input_error("grid domain must be a finite interval");
  }
}

void validate(const FunctionSample& f) {
  validate(f.grid);
  if (f.values.size() != f.grid.num_points) {
    throw invalid_input_error("function has " + std::to_string(f.values.size()) +
                              " values on a grid of " +
                              std::to_string(f.grid.num_points) + " points");
  }
  if (!all_finite(f.values)) {
    throw invalid_input_error("function values must be finite");
  }
}

void validate(const SrvfSample& q) {
  validate(q.grid);
  if (q.values.size() != q.grid.num_points) {
    throw invalid_input_error("SRVF has " + std::to_string(q.values.size()) +
                              " values on a grid of " +
                              std::to_string(q.grid.num_points) + " points");
  }
  if (!all_finite(q.values) || !std::isfinite(q.f0)) {
    throw invalid_input_error("SRVF values must be finite");
  }
}

std::vector<double> derivative(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n);
  if (n < 3) {
    throw invalid_input_error("derivative needs at least 3 samples");
  }
  for (std::size_t j = 1; j + 1 < n; ++j) {
    d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
  }
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

double trapz(const std::vector<double>& v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t j = 1; j + 1 < v.size(); ++j) s += v[j];
  return s * h;
}

std::vector<double> cumtrapz(const std::vector<double>& v, double h) {
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t j = 1; j < v.size(); ++j) {
    out[j] = out[j - 1] + 0.5 * h * (v[j - 1] + v[j]);
  }
  return out;
}

std::vector<double> quad_weights(std::size_t num_points, double h) {
  std::vector<double> w(num_points, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

double l2_inner(const std::vector<double>& a, const std::vector<double>& b,
                const Grid& grid) {
  if (a.size() != b.size() || a.size() != grid.num_points) {
    throw invalid_input_error("l2_inner: size mismatch");
  }
  const double h = grid.spacing();
  double s = 0.5 * (a.front() * b.front() + a.back() * b.back());
  for (std::size_t j = 1; j + 1 < a.size(); ++j) s += a[j] * b[j];
  return s * h;
}

double l2_norm(const std::vector<double>& a, const Grid& grid) {
  return std::sqrt(std::max(0.0, l2_inner(a, a, grid)));
}

double l2_distance(const std::vector<double>& a, const std::vector<double>& b,
                   const Grid& grid) {
  if (a.size() != b.size() || a.size() != grid.num_points) {
    throw invalid_input_error("l2_distance: size mismatch");
  }
  const double h = grid.spacing();
  auto sq = [](double x) { return x * x; };
  double s = 0.5 * (sq(a.front() - b.front()) + sq(a.back() - b.back()));
  for (std::size_t j = 1; j + 1 < a.size(); ++j) s += sq(a[j] - b[j]);
  return std::sqrt(std::max(0.0, s * h));
}

double interp_uniform(const std::vector<double>& v, double x) {
  const std::size_t n = v.size();
  if (x <= 0.0) return v.front();
  if (x >= 1.0) return v.back();
  const double pos = x * static_cast<double>(n - 1);
  std::size_t j = static_cast<std::size_t>(pos);
  if (j >= n - 1) j = n - 2;
  const double frac = pos - static_cast<double>(j);
  return v[j] + frac * (v[j + 1] - v[j]);
}

SrvfSample srvf_transform(const FunctionSample& f) {
  validate(f);
  const auto df = derivative(f.values, f.grid.spacing());
  SrvfSample q;
  q.grid = f.grid;
  q.f0 = f.values.front();
  q.values.resize(df.size());
  for (std::size_t j = 0; j < df.size(); ++j) {
    const double d = df[j];
    q.values[j] = (d >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::fabs(d));
  }
  return q;
}

FunctionSample srvf_inverse(const SrvfSample& q) {
  validate(q);
  std::vector<double> integrand(q.values.size());
  for (std::size_t j = 0; j < q.values.size(); ++j) {
    integrand[j] = q.values[j] * std::fabs(q.values[j]);
  }
  FunctionSample f;
  f.grid = q.grid;
  f.values = cumtrapz(integrand, q.grid.spacing());
  for (double& v : f.values) v += q.f0;
  return f;
}

FunctionSample box_smooth(const FunctionSample& f, const SmoothingConfig& cfg) {
  validate(f);
  if (cfg.window % 2 == 0 || cfg.window == 0) {
    throw invalid_input_error("smoothing window must be odd and positive");
  }
  if (cfg.window > f.values.size()) {
    throw invalid_input_error("smoothing window exceeds the grid size");
  }
  FunctionSample out = f;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.values.size());
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(cfg.window / 2);
  std::vector<double> next(f.values.size());
  for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j - half);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, j + half);
      double s = 0.0;
      for (std::ptrdiff_t k = lo; k <= hi; ++k) s += out.values[k];
      next[j] = s / static_cast<double>(hi - lo + 1);
    }
    out.values = next;
  }
  return out;
}

FunctionSample resample(const FunctionSample& f, std::size_t new_num_points) {
  validate(f);
  if (new_num_points < 3) {
    throw invalid_input_error("resample target needs at least 3 points");
  }
  FunctionSample out;
  out.grid = Grid{new_num_points, f.grid.domain_min, f.grid.domain_max};
  out.label = f.label;
  out.values.resize(new_num_points);
  for (std::size_t j = 0; j < new_num_points; ++j) {
    out.values[j] = interp_uniform(f.values, out.grid.t(j));
  }
  return out;
}

}  // namespace efcp
