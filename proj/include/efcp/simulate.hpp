#pragma once

#include <cstddef>
#include <cstdint>

#include <vector>

#include "efcp/function.hpp"

namespace efcp {

enum class Design { amplitude_change, phase_change, sensitivity, null_design };

struct AmplitudeDesignParams {
  double z_mean_pre = 1.0;
  double z_mean_post = 1.5;
  double z_sd = 0.05;
  double a_mean = 0.0;
  double a_sd = 1.25;
};

struct PhaseDesignParams {
  double z_mean = 1.0;
  double z_sd = 0.25;
  double a_shift = 1.0;  // post-change shift of the warp parameter mean
};

struct SensitivityDesignParams {
  double coef_sd = 0.2828427124746190;  // sqrt(.08)
  double star_min = -1.0;
  double star_max = 1.0;
  double min_change = 0.5;  // redraw until |da*| + |db*| >= this
};

struct SimSpec {
  Design design = Design::amplitude_change;
  Design null_base = Design::amplitude_change;  // used when design == null
  std::size_t n = 75;
  std::size_t changepoint = 30;  // last pre-change index, 1-based
  std::size_t grid_size = 101;
  std::uint64_t rng_seed = 0;
  AmplitudeDesignParams amplitude{};
  PhaseDesignParams phase{};
  SensitivityDesignParams sensitivity{};

  void validate() const;
};

// Exponential-family warp of the phase design, on its original domain
// [-3, 3]; a = 0 is the identity.
double phase_design_warp(double t, double a);

std::vector<FunctionSample> gen_amplitude_change(const SimSpec& spec);
std::vector<FunctionSample> gen_phase_change(const SimSpec& spec);
std::vector<FunctionSample> gen_sensitivity(const SimSpec& spec);
std::vector<FunctionSample> gen_null(const SimSpec& spec);

// Dispatch on spec.design.
std::vector<FunctionSample> generate(const SimSpec& spec);

}  // namespace efcp
