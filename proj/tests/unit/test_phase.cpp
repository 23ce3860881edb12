#include <cmath>

#include <vector>

#include "doctest.h"
#include "efcp/errors.hpp"
#include "efcp/function.hpp"
#include "efcp/phase.hpp"
#include "efcp/rng.hpp"
#include "efcp/warping.hpp"

using namespace efcp;

namespace {

Warping power_warp(std::size_t t, double p) {
  Warping g;
  g.grid = Grid{t, 0.0, 1.0};
  g.values.resize(t);
  for (std::size_t j = 0; j < t; ++j) g.values[j] = std::pow(g.grid.t(j), p);
  g.values.front() = 0.0;
  g.values.back() = 1.0;
  return g;
}

// Sinusoidal warp with slopes in [1-a, 1+a], bounded at the endpoints.
Warping bump_warp(std::size_t t, double a) {
  Warping g;
  g.grid = Grid{t, 0.0, 1.0};
  g.values.resize(t);
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (std::size_t j = 0; j < t; ++j) {
    const double x = g.grid.t(j);
    g.values[j] = x - a * std::sin(two_pi * x) / two_pi;
  }
  g.values.front() = 0.0;
  g.values.back() = 1.0;
  return g;
}

// Random tangent vector at `base` with the requested norm.
ShootingVector random_tangent(const PsiSample& base, double norm,
                              Rng& rng) {
  ShootingVector v;
  v.grid = base.grid;
  v.base = base;
  v.values.resize(base.values.size());
  for (auto& x : v.values) x = rng.normal();
  const double proj = l2_inner(v.values, base.values, base.grid);
  for (std::size_t j = 0; j < v.values.size(); ++j) {
    v.values[j] -= proj * base.values[j];
  }
  const double n = l2_norm(v.values, base.grid);
  for (auto& x : v.values) x *= norm / n;
  return v;
}

}  // namespace

TEST_CASE("psi of the identity warp is constant one") {
  const auto psi = to_psi(identity_warping(Grid{101, 0.0, 1.0}));
  for (double v : psi.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(l2_norm(psi.values, psi.grid) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("psi of t^2 is sqrt(2t) with unit norm") {
  const auto psi = to_psi(power_warp(201, 2.0));
  CHECK(l2_norm(psi.values, psi.grid) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t j = 1; j + 1 < 201; ++j) {
    CHECK(psi.values[j] ==
          doctest::Approx(std::sqrt(2.0 * psi.grid.t(j))).epsilon(2e-2));
  }
}

TEST_CASE("from_psi inverts to_psi") {
  const Warping warps[] = {power_warp(201, 0.8), power_warp(201, 1.0),
                           power_warp(201, 1.7), bump_warp(201, 0.5)};
  for (const Warping& g : warps) {
    const Warping back = from_psi(to_psi(g));
    double worst = 0.0;
    for (std::size_t j = 0; j < 201; ++j) {
      worst = std::max(worst, std::fabs(back.values[j] - g.values[j]));
    }
    CHECK(worst <= 1e-3);
    CHECK_NOTHROW(validate(back));
  }
}

TEST_CASE("from_psi of constant one is the identity") {
  PsiSample psi;
  psi.grid = Grid{101, 0.0, 1.0};
  psi.values.assign(101, 1.0);
  const auto g = from_psi(psi);
  for (std::size_t j = 0; j < 101; ++j) {
    CHECK(g.values[j] == doctest::Approx(g.grid.t(j)).epsilon(1e-12));
  }
}

TEST_CASE("phase distance oracle: identity vs t^2") {
  // inner product = int sqrt(2t) dt = 2 sqrt(2) / 3
  const double expected = std::acos(2.0 * std::sqrt(2.0) / 3.0);
  const double d = phase_distance(identity_warping(Grid{201, 0.0, 1.0}),
                                  power_warp(201, 2.0));
  CHECK(d == doctest::Approx(expected).epsilon(3e-3));
  CHECK(d == doctest::Approx(0.3398).epsilon(3e-3));
}

TEST_CASE("phase distance is a symmetric premetric") {
  const Warping a = power_warp(101, 1.4);
  const Warping b = power_warp(101, 0.8);
  const Warping c = power_warp(101, 2.2);
  // acos near 1 floors out around sqrt(machine eps)
  CHECK(phase_distance(a, a) <= 1e-7);
  CHECK(phase_distance(a, b) == phase_distance(b, a));
  CHECK(phase_distance(a, c) <=
        phase_distance(a, b) + phase_distance(b, c) + 1e-8);
}

TEST_CASE("exp and log are mutually inverse") {
  const PsiSample base = to_psi(identity_warping(Grid{151, 0.0, 1.0}));
  Rng rng(99);
  for (double norm : {1e-3, 0.1, 0.5, 1.0}) {
    const ShootingVector v = random_tangent(base, norm, rng);
    const PsiSample psi = exp_map(v);
    CHECK(l2_norm(psi.values, psi.grid) ==
          doctest::Approx(1.0).epsilon(1e-10));
    const ShootingVector back = log_map(psi, base);
    double worst = 0.0;
    for (std::size_t j = 0; j < v.values.size(); ++j) {
      worst = std::max(worst, std::fabs(back.values[j] - v.values[j]));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("log_map norm equals the phase distance") {
  const Warping id = identity_warping(Grid{201, 0.0, 1.0});
  const Warping g = power_warp(201, 2.0);
  const PsiSample base = to_psi(id);
  const ShootingVector v = log_map(to_psi(g), base);
  CHECK(l2_norm(v.values, v.grid) ==
        doctest::Approx(phase_distance(g, id)).epsilon(1e-8));
  // tangency
  CHECK(std::fabs(l2_inner(v.values, base.values, base.grid)) <= 1e-6);
}

TEST_CASE("log_map of the base point is zero, exp of zero is the base") {
  const PsiSample base = to_psi(power_warp(101, 1.5));
  const ShootingVector zero = log_map(base, base);
  CHECK(l2_norm(zero.values, zero.grid) <= 1e-8);
  const PsiSample back = exp_map(zero);
  for (std::size_t j = 0; j < 101; ++j) {
    CHECK(back.values[j] == doctest::Approx(base.values[j]).epsilon(1e-10));
  }
}

TEST_CASE("karcher_mean_warps trivia") {
  const Warping g = power_warp(101, 1.5);
  SUBCASE("n = 1") {
    const auto res = karcher_mean_warps({g});
    CHECK(res.mean_warp.values == g.values);
    CHECK(phase_distance(res.mean_warp, g) <= 1e-7);
  }
  SUBCASE("identical inputs") {
    const auto res = karcher_mean_warps({g, g, g});
    CHECK(res.converged);
    CHECK(res.mean_warp.values == g.values);
    CHECK(phase_distance(res.mean_warp, g) <= 1e-7);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(karcher_mean_warps({}), invalid_input_error);
  }
}

TEST_CASE("mean of an inverse pair sits at the geodesic midpoint") {
  const Warping a = power_warp(201, 1.5);
  const Warping b = power_warp(201, 1.0 / 1.5);
  const auto res = karcher_mean_warps({a, b});
  const Warping id = identity_warping(Grid{201, 0.0, 1.0});

  // Exact sphere geometry for this pair: psi_a = sqrt(1.5) t^{1/4} and
  // psi_b = sqrt(2/3) t^{-1/6} both make the angle acos(sqrt(1.5)*4/5) with
  // the constant psi of the identity, and acos(12/13) with each other.  The
  // two-point mean is the geodesic midpoint, which the isoceles right-triangle
  // relation cos(th_a) = cos(d)*cos(th_ab/2) places about 0.040 away from the
  // identity -- near it relative to th_a = 0.201, but not closer.
  const double th_a = std::acos(std::sqrt(1.5) * 0.8);
  const double th_ab = std::acos(12.0 / 13.0);
  const double d_mid = std::acos(std::cos(th_a) / std::cos(0.5 * th_ab));
  const double d_id = phase_distance(res.mean_warp, id);
  CHECK(d_id == doctest::Approx(d_mid).epsilon(0.15));
  CHECK(d_id < 0.25 * th_a);

  const double da = phase_distance(res.mean_warp, a);
  const double db = phase_distance(res.mean_warp, b);
  CHECK(da == doctest::Approx(db).epsilon(0.05));
  CHECK(da == doctest::Approx(0.5 * th_ab).epsilon(0.05));

  // objective decreases monotonically
  for (std::size_t i = 1; i < res.objective_history.size(); ++i) {
    CHECK(res.objective_history[i] <= res.objective_history[i - 1] + 1e-10);
  }
}

TEST_CASE("shooting vectors at the mean average to roughly zero") {
  std::vector<Warping> gs;
  for (double p : {0.7, 0.9, 1.2, 1.5}) gs.push_back(power_warp(151, p));
  const auto mean = karcher_mean_warps(gs, 1e-8, 200);
  const auto vs = shooting_vectors(gs, mean.mean_psi);
  REQUIRE(vs.size() == gs.size());
  std::vector<double> avg(151, 0.0);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    CHECK(l2_norm(vs[i].values, vs[i].grid) ==
          doctest::Approx(psi_distance(to_psi(gs[i]), mean.mean_psi))
              .epsilon(1e-8));
    for (std::size_t j = 0; j < 151; ++j) avg[j] += vs[i].values[j] / 4.0;
  }
  CHECK(l2_norm(avg, vs.front().grid) <= 1e-6);
}
