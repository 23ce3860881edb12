#pragma once

#include <cstddef>

#include <string>
#include <vector>

namespace efcp {

// Uniform sampling grid.  Internally every function lives on [0, 1] with
// points t_j = j / (T - 1); the original domain is kept as metadata and only
// matters when reading or writing files.
struct Grid {
  std::size_t num_points = 0;
  double domain_min = 0.0;
  double domain_max = 1.0;

  double spacing() const { return 1.0 / static_cast<double>(num_points - 1); }
  double t(std::size_t j) const {
    return static_cast<double>(j) / static_cast<double>(num_points - 1);
  }
  double original(std::size_t j) const {
    return domain_min + (domain_max - domain_min) * t(j);
  }

  bool operator==(const Grid&) const = default;
};

// Throws invalid_input_error unless the grid has at least three points and a
// nondegenerate, finite domain.
void validate(const Grid& grid);

struct FunctionSample {
  Grid grid;
  std::vector<double> values;
  std::string label;
};

// SRVF of a function together with the initial value needed to invert.
struct SrvfSample {
  Grid grid;
  std::vector<double> values;
  double f0 = 0.0;
};

void validate(const FunctionSample& f);
void validate(const SrvfSample& q);

struct SmoothingConfig {
  std::size_t window = 5;  // odd, >= 1
  std::size_t passes = 1;
};

// --- quadrature and calculus on the internal [0, 1] grid ---

// d/dt by centered differences; second-order one-sided stencils at the ends.
std::vector<double> derivative(const std::vector<double>& v, double h);

double trapz(const std::vector<double>& v, double h);
std::vector<double> cumtrapz(const std::vector<double>& v, double h);

// Trapezoid weights h * [1/2, 1, ..., 1, 1/2].
std::vector<double> quad_weights(std::size_t num_points, double h);

double l2_inner(const std::vector<double>& a, const std::vector<double>& b,
                const Grid& grid);
double l2_norm(const std::vector<double>& a, const Grid& grid);
double l2_distance(const std::vector<double>& a, const std::vector<double>& b,
                   const Grid& grid);

// Linear interpolation of samples on the uniform [0, 1] grid; x is clamped
// to [0, 1].
double interp_uniform(const std::vector<double>& v, double x);

// --- core transforms ---

// q = sign(f') sqrt(|f'|)
SrvfSample srvf_transform(const FunctionSample& f);

// f(t) = f0 + int_0^t q|q|
FunctionSample srvf_inverse(const SrvfSample& q);

// Moving average whose window shrinks near the ends (the average runs over
// the part of the window that stays inside the domain).
FunctionSample box_smooth(const FunctionSample& f, const SmoothingConfig& cfg);

FunctionSample resample(const FunctionSample& f, std::size_t new_num_points);

}  // namespace efcp
