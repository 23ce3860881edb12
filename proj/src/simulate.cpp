#include "efcp/simulate.hpp"

#include <cmath>

#include <string>

#include "efcp/errors.hpp"
#include "efcp/rng.hpp"

namespace efcp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string index_label(std::size_t i) { return std::to_string(i + 1); }

}  // namespace

double phase_design_warp(double t, double a) {
  if (a == 0.0) return t;
  return 6.0 * ((std::exp(a * (t + 3.0) / 6.0) - 1.0) / (std::exp(a) - 1.0)) -
         3.0;
}

void SimSpec::validate() const {
  if (n < 2) throw invalid_input_error("simulation needs n >= 2");
  if (!(changepoint >= 1 && changepoint < n)) {
    throw invalid_input_error("changepoint must satisfy 1 <= k < n");
  }
  if (grid_size < 21) {
    throw invalid_input_error("simulation grid must have at least 21 points");
  }
  if (design == Design::null_design && null_base == Design::null_design) {
    throw invalid_input_error("null design needs a concrete base design");
  }
}

namespace {

std::vector<FunctionSample> amplitude_impl(const SimSpec& spec,
                                           bool with_change) {
  const Grid grid{spec.grid_size, -6.0, 6.0};
  const auto& p = spec.amplitude;
  Rng rng(spec.rng_seed);
  std::vector<FunctionSample> fs(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double z_mean =
        (with_change && i >= spec.changepoint) ? p.z_mean_post : p.z_mean_pre;
    const double z = rng.normal(z_mean, p.z_sd);
    const double a = rng.normal(p.a_mean, p.a_sd);
    fs[i].grid = grid;
    fs[i].label = index_label(i);
    fs[i].values.resize(spec.grid_size);
    for (std::size_t j = 0; j < spec.grid_size; ++j) {
      const double t = grid.original(j);
      fs[i].values[j] = z * std::exp(-0.5 * (t - a) * (t - a));
    }
  }
  return fs;
}

std::vector<FunctionSample> phase_impl(const SimSpec& spec, bool with_change) {
  const Grid grid{spec.grid_size, -3.0, 3.0};
  const auto& p = spec.phase;
  Rng rng(spec.rng_seed);
  std::vector<FunctionSample> fs(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double z1 = rng.normal(p.z_mean, p.z_sd);
    const double z2 = rng.normal(p.z_mean, p.z_sd);
    double a = rng.uniform(-1.0, 1.0);
    if (with_change && i >= spec.changepoint) a += p.a_shift;
    fs[i].grid = grid;
    fs[i].label = index_label(i);
    fs[i].values.resize(spec.grid_size);
    for (std::size_t j = 0; j < spec.grid_size; ++j) {
      const double t = grid.original(j);
      const double g = phase_design_warp(t, a);
      fs[i].values[j] = z1 * std::exp(-0.5 * (g - 1.5) * (g - 1.5)) +
                        z2 * std::exp(-0.5 * (g + 1.5) * (g + 1.5));
    }
  }
  return fs;
}

std::vector<FunctionSample> sensitivity_impl(const SimSpec& spec,
                                             bool with_change) {
  const Grid grid{spec.grid_size, 0.0, 1.0};
  const auto& p = spec.sensitivity;
  Rng rng(spec.rng_seed);
  const double a_star_pre = rng.uniform(p.star_min, p.star_max);
  const double b_star_pre = rng.uniform(p.star_min, p.star_max);
  double a_star_post = a_star_pre;
  double b_star_post = b_star_pre;
  if (with_change) {
    do {
      a_star_post = rng.uniform(p.star_min, p.star_max);
      b_star_post = rng.uniform(p.star_min, p.star_max);
    } while (std::fabs(a_star_post - a_star_pre) +
                 std::fabs(b_star_post - b_star_pre) <
             p.min_change);
  }
  std::vector<FunctionSample> fs(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const bool post = with_change && i >= spec.changepoint;
    const double a_star = post ? a_star_post : a_star_pre;
    const double b_star = post ? b_star_post : b_star_pre;
    const double a0 = rng.normal(a_star, p.coef_sd);
    const double b0 = rng.normal(b_star, p.coef_sd);
    const double a1 = rng.normal(a_star, p.coef_sd);
    const double b1 = rng.normal(b_star, p.coef_sd);
    fs[i].grid = grid;
    fs[i].label = index_label(i);
    fs[i].values.resize(spec.grid_size);
    for (std::size_t j = 0; j < spec.grid_size; ++j) {
      const double t = grid.t(j);
      fs[i].values[j] = a0 * std::cos(kTwoPi * t) + b0 * std::sin(kTwoPi * t) +
                        a1 * std::cos(2.0 * kTwoPi * t) +
                        b1 * std::sin(2.0 * kTwoPi * t);
    }
  }
  return fs;
}

}  // namespace

std::vector<FunctionSample> gen_amplitude_change(const SimSpec& spec) {
  spec.validate();
  return amplitude_impl(spec, true);
}

std::vector<FunctionSample> gen_phase_change(const SimSpec& spec) {
  spec.validate();
  return phase_impl(spec, true);
}

std::vector<FunctionSample> gen_sensitivity(const SimSpec& spec) {
  spec.validate();
  return sensitivity_impl(spec, true);
}

std::vector<FunctionSample> gen_null(const SimSpec& spec) {
  spec.validate();
  const Design base =
      spec.design == Design::null_design ? spec.null_base : spec.design;
  switch (base) {
    case Design::amplitude_change:
      return amplitude_impl(spec, false);
    case Design::phase_change:
      return phase_impl(spec, false);
    case Design::sensitivity:
      return sensitivity_impl(spec, false);
    case Design::null_design:
      break;
  }
  throw invalid_input_error("null design needs a concrete base design");
}

std::vector<FunctionSample> generate(const SimSpec& spec) {
  spec.validate();
  switch (spec.design) {
    case Design::amplitude_change:
      return gen_amplitude_change(spec);
    case Design::phase_change:
      return gen_phase_change(spec);
    case Design::sensitivity:
      return gen_sensitivity(spec);
    case Design::null_design:
      return gen_null(spec);
  }
  throw invalid_input_error("unknown design");
}

}  // namespace efcp
