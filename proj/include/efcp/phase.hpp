#pragma once

#include <cstddef>

#include <vector>

#include "efcp/function.hpp"
#include "efcp/warping.hpp"

namespace efcp {

// psi = sqrt(gamma-dot): a point on the positive orthant of the unit sphere.
struct PsiSample {
  Grid grid;
  std::vector<double> values;
};

// Tangent vector at a base point of the sphere.
struct ShootingVector {
  Grid grid;
  std::vector<double> values;
  PsiSample base;
};

void validate(const PsiSample& psi);
void validate(const ShootingVector& v);

// sqrt of the finite-difference derivative, renormalized to unit norm.
PsiSample to_psi(const Warping& gamma);

// gamma(t) = int_0^t psi^2, renormalized so gamma(1) = 1.
Warping from_psi(const PsiSample& psi);

// Arc length on the sphere: arccos of the (clamped) inner product.
double psi_distance(const PsiSample& a, const PsiSample& b);
double phase_distance(const Warping& g1, const Warping& g2);

// exp_psi(v) = cos(|v|) psi + sin(|v|) v/|v|.
PsiSample exp_map(const ShootingVector& v);

// Inverse of exp_map at `base`; throws numerical_error for antipodal inputs.
ShootingVector log_map(const PsiSample& psi1, const PsiSample& base);

struct WarpMeanResult {
  Warping mean_warp;
  PsiSample mean_psi;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // sum of squared phase distances
};

// Intrinsic (Karcher) mean of warps on the sphere; gradient descent with
// step 0.5, halved whenever the objective would increase.
WarpMeanResult karcher_mean_warps(const std::vector<Warping>& gs,
                                  double tol = 1e-6, int max_iter = 100);

// log_map of every warp's psi at the common base.
std::vector<ShootingVector> shooting_vectors(const std::vector<Warping>& gs,
                                             const PsiSample& base);

}  // namespace efcp
