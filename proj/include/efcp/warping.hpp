#pragma once

#include <cstddef>

#include <vector>

#include "efcp/function.hpp"

namespace efcp {

// Discrete warping function: boundary-pinned, strictly increasing samples of
// a diffeomorphism of [0,1].
struct Warping {
  Grid grid;
  std::vector<double> values;
};

Warping identity_warping(const Grid& grid);
void validate(const Warping& gamma);

// Lifts any non-increasing step by epsilon and renormalizes back to
// gamma(0) = 0, gamma(1) = 1.
Warping repair_monotone(Warping gamma, double epsilon = 1e-9);

// (q, gamma) = (q o gamma) sqrt(gamma-dot).  gamma is resampled onto q's
// grid when the sizes differ.
SrvfSample group_action(const SrvfSample& q, const Warping& gamma);

// f o gamma by linear interpolation.
FunctionSample warp_function(const FunctionSample& f, const Warping& gamma);

// Numerical inverse: swap axes, re-interpolate onto the uniform grid.
Warping invert_warp(const Warping& gamma);

// g1 o g2, i.e. t -> g1(g2(t)).
Warping compose(const Warping& g1, const Warping& g2);

namespace reg {

// Lattice neighbor steps: slopes dj/di with 1 <= di, dj <= 7 coprime.
struct Step {
  int di;
  int dj;
};
const std::vector<Step>& lattice_steps();

// Precomputed trapezoid costs of every lattice edge for one SRVF pair; the
// registration DP and the exhaustive-search oracle read the same table, so
// their path sums agree bit for bit.
class EdgeCostTable {
 public:
  EdgeCostTable(const std::vector<double>& q1, const std::vector<double>& q2,
                double h);

  // Cost of stepping from (i0, j0) by steps()[s]; +inf when out of range.
  double cost(int i0, int j0, int s) const {
    return costs_[(static_cast<std::size_t>(i0) * t_ + j0) * num_steps_ + s];
  }
  int grid_size() const { return static_cast<int>(t_); }

 private:
  std::size_t t_;
  std::size_t num_steps_;
  std::vector<double> costs_;
};

struct DpResult {
  Warping warp;       // minimizing gamma reconstructed from the lattice path
  double energy;      // DP value at (T-1, T-1): accumulated local energy
};

DpResult dp_register(const std::vector<double>& q1,
                     const std::vector<double>& q2, const Grid& grid);

// Exhaustive minimum over every monotone lattice path (test oracle; feasible
// only for small T).
double exhaustive_min_energy(const std::vector<double>& q1,
                             const std::vector<double>& q2, const Grid& grid);

}  // namespace reg

struct OptimalWarpResult {
  Warping warp;
  double distance;   // achieved ||q1 - (q2, warp)||
  double dp_energy;  // lattice DP value (squared-distance scale)
};

// Minimizes ||q1 - (q2, gamma)|| over the DP search space.
OptimalWarpResult optimal_warp(const SrvfSample& q1, const SrvfSample& q2);

// d_a: SRVF transform + optimal_warp, minimum of the two DP directions.
double amplitude_distance(const FunctionSample& f1, const FunctionSample& f2);

}  // namespace efcp
