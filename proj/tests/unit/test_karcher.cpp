#include <algorithm>
#include <cmath>

#include <vector>

#include "doctest.h"
#include "efcp/errors.hpp"
#include "efcp/function.hpp"
#include "efcp/karcher.hpp"
#include "efcp/phase.hpp"
#include "efcp/warping.hpp"

using namespace efcp;

namespace {

std::vector<FunctionSample> gaussian_family(std::size_t n, std::size_t t) {
  // peaks at centers equally spaced in [-1, 1] on the domain [-6, 6]
  std::vector<FunctionSample> fs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a =
        -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    fs[i].grid = Grid{t, -6.0, 6.0};
    fs[i].label = std::to_string(i + 1);
    fs[i].values.resize(t);
    for (std::size_t j = 0; j < t; ++j) {
      const double x = fs[i].grid.original(j);
      fs[i].values[j] = std::exp(-0.5 * (x - a) * (x - a));
    }
  }
  return fs;
}

double mean_pairwise_l2(const std::vector<FunctionSample>& fs) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      total += l2_distance(fs[i].values, fs[j].values, fs[i].grid);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace

TEST_CASE("alignment of a single function is trivial") {
  auto fs = gaussian_family(5, 101);
  const AlignmentResult ar = karcher_mean_align({fs[2]});
  CHECK(ar.converged);
  CHECK(ar.iterations == 1);
  const SrvfSample q = srvf_transform(fs[2]);
  for (std::size_t j = 0; j < 101; ++j) {
    CHECK(ar.mean_q.values[j] == doctest::Approx(q.values[j]).epsilon(1e-10));
    CHECK(ar.warps[0].values[j] ==
          doctest::Approx(ar.warps[0].grid.t(j)).epsilon(1e-8));
  }
}

TEST_CASE("alignment of identical functions yields identity warps") {
  auto fs = gaussian_family(5, 101);
  std::vector<FunctionSample> same(6, fs[1]);
  const AlignmentResult ar = karcher_mean_align(same);
  CHECK(ar.converged);
  const SrvfSample q = srvf_transform(fs[1]);
  for (const auto& g : ar.warps) {
    double worst = 0.0;
    for (std::size_t j = 0; j < 101; ++j) {
      worst = std::max(worst, std::fabs(g.values[j] - g.grid.t(j)));
    }
    CHECK(worst <= 1e-6);
  }
  CHECK(l2_distance(ar.mean_q.values, q.values, q.grid) <= 1e-8);
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(karcher_mean_align({}), invalid_input_error);
}

TEST_CASE("mismatched grids are rejected") {
  auto fs = gaussian_family(3, 101);
  fs[1] = resample(fs[1], 51);
  CHECK_THROWS_AS(karcher_mean_align(fs), invalid_input_error);
}

TEST_CASE("peak family collapses after alignment") {
  auto fs = gaussian_family(21, 101);
  const AlignmentResult ar = karcher_mean_align(fs);

  const double before = mean_pairwise_l2(fs);
  const double after = mean_pairwise_l2(ar.aligned_f);
  CHECK(after <= 0.1 * before);

  // objective history is monotone non-increasing
  for (std::size_t i = 1; i < ar.objective_history.size(); ++i) {
    CHECK(ar.objective_history[i] <= ar.objective_history[i - 1] + 1e-8);
  }

  // aligned_q[i] reproduces the group action of the stored warp
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const SrvfSample redo =
        group_action(srvf_transform(fs[i]), ar.warps[i]);
    CHECK(l2_distance(redo.values, ar.aligned_q[i].values, redo.grid) <=
          1e-9);
  }

  // warp centering: the Karcher mean of the warps is close to identity
  const auto wm = karcher_mean_warps(ar.warps);
  CHECK(phase_distance(wm.mean_warp,
                       identity_warping(Grid{101, 0.0, 1.0})) <= 1e-2);
}

TEST_CASE("permuting the inputs leaves the mean unchanged") {
  auto fs = gaussian_family(9, 81);
  const AlignmentResult a = karcher_mean_align(fs);
  std::vector<FunctionSample> shuffled = fs;
  std::rotate(shuffled.begin(), shuffled.begin() + 4, shuffled.end());
  const AlignmentResult b = karcher_mean_align(shuffled);
  CHECK(l2_distance(a.mean_q.values, b.mean_q.values, a.mean_q.grid) <= 1e-6);
}

TEST_CASE("common warp barely moves the mean") {
  auto fs = gaussian_family(7, 201);
  // sinusoidal warp: slopes stay in [0.5, 1.5], so re-registration is not
  // limited by endpoint slope degeneracy
  Warping g;
  g.grid = Grid{201, 0.0, 1.0};
  g.values.resize(201);
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (std::size_t j = 0; j < 201; ++j) {
    const double x = g.grid.t(j);
    g.values[j] = x - 0.5 * std::sin(two_pi * x) / two_pi;
  }
  g.values.front() = 0.0;
  g.values.back() = 1.0;

  std::vector<FunctionSample> warped = fs;
  for (auto& f : warped) f = warp_function(f, g);

  const AlignmentResult a = karcher_mean_align(fs);
  const AlignmentResult b = karcher_mean_align(warped);
  const FunctionSample fa = a.mean_f;
  const FunctionSample fb = b.mean_f;
  const double qn = l2_norm(a.mean_q.values, a.mean_q.grid);
  CHECK(amplitude_distance(fa, fb) <= 1e-2 * std::max(qn, 1.0));
}

TEST_CASE("prefix means are running averages") {
  // three synthetic functions on a T = 5 grid; srvf values are hand-checked
  // via the running-average identity on aligned_q
  auto fs = gaussian_family(3, 65);
  const AlignmentResult ar = karcher_mean_align(fs);
  const auto pm = prefix_means(ar);
  REQUIRE(pm.size() == 3);

  // k = 1: the first aligned srvf itself
  CHECK(l2_distance(pm[0].values, ar.aligned_q[0].values, pm[0].grid) == 0.0);

  // k = 2, 3: exact arithmetic averages
  for (std::size_t j = 0; j < pm[1].values.size(); ++j) {
    const double expect =
        (ar.aligned_q[0].values[j] + ar.aligned_q[1].values[j]) / 2.0;
    CHECK(pm[1].values[j] == doctest::Approx(expect).epsilon(1e-14));
  }
  for (std::size_t j = 0; j < pm[2].values.size(); ++j) {
    const double expect =
        (ar.aligned_q[0].values[j] + ar.aligned_q[1].values[j] +
         ar.aligned_q[2].values[j]) /
        3.0;
    CHECK(pm[2].values[j] == doctest::Approx(expect).epsilon(1e-13));
  }

  // k = n matches mean_q
  CHECK(l2_distance(pm[2].values, ar.mean_q.values, pm[2].grid) <= 1e-8);

  // f0 prefix means
  CHECK(pm[1].f0 == doctest::Approx((srvf_transform(fs[0]).f0 +
                                     srvf_transform(fs[1]).f0) /
                                    2.0));
}
