#pragma once

#include <cstddef>

#include <vector>

#include "efcp/function.hpp"
#include "efcp/karcher.hpp"
#include "efcp/phase.hpp"

namespace efcp {

// Either a fixed component count or a cumulative-variance fraction.
struct ComponentSelector {
  enum class Kind { fixed, fraction };
  Kind kind = Kind::fraction;
  int fixed_count = 1;
  double fraction = 0.95;

  static ComponentSelector fixed(int d) {
    return {Kind::fixed, d, 0.0};
  }
  static ComponentSelector cumulative(double tau) {
    return {Kind::fraction, 0, tau};
  }
};

std::size_t select_components(const std::vector<double>& eigenvalues,
                              const ComponentSelector& sel);

enum class FpcaKind { vertical, horizontal };

struct FpcaResult {
  FpcaKind kind = FpcaKind::vertical;
  Grid grid;
  // Length T+1 for vertical ([q, f(0)] coordinates), T for horizontal
  // (zero vector: shooting vectors are not re-centered).
  std::vector<double> mean;
  std::vector<std::vector<double>> directions;  // p rows, weighted-orthonormal
  std::vector<double> eigenvalues;              // p, descending, >= 0
  std::vector<std::vector<double>> scores;      // n x p
  std::vector<double> weights;                  // quadrature weights used
};

// fPCA of the combined vectors h_i = [q~_i, f_i(0)].
FpcaResult vertical_fpca(const AlignmentResult& ar,
                         const ComponentSelector& sel);

// fPCA of shooting vectors at a common base; per the covariance operator
// K_psi the samples are NOT re-centered unless `center` is set.
FpcaResult horizontal_fpca(const std::vector<ShootingVector>& vs,
                           const ComponentSelector& sel, bool center = false);

// All eigenvalues (descending, clamped at zero) of the weighted sample
// covariance operator of `rows`, with 1/(n-1) scaling.
std::vector<double> covariance_eigenvalues(
    const std::vector<std::vector<double>>& rows,
    const std::vector<double>& weights, bool center);

}  // namespace efcp
