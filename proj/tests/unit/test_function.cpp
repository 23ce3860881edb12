#include <cmath>

#include <vector>

#include "doctest.h"
#include "efcp/errors.hpp"
#include "efcp/function.hpp"

using namespace efcp;

namespace {

FunctionSample make_sample(std::size_t t, double lo, double hi,
                           double (*fn)(double)) {
  FunctionSample f;
  f.grid = Grid{t, lo, hi};
  f.values.resize(t);
  for (std::size_t j = 0; j < t; ++j) f.values[j] = fn(f.grid.t(j));
  return f;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(validate(Grid{2, 0.0, 1.0}), invalid_input_error);
  CHECK_THROWS_AS(validate(Grid{11, 1.0, 1.0}), invalid_input_error);
  CHECK_NOTHROW(validate(Grid{3, -6.0, 6.0}));
}

TEST_CASE("srvf of constant is zero") {
  auto f = make_sample(51, 0.0, 1.0, [](double) { return 2.5; });
  const auto q = srvf_transform(f);
  CHECK(q.f0 == 2.5);
  for (double v : q.values) CHECK(v == 0.0);
}

TEST_CASE("srvf of identity is one") {
  auto f = make_sample(51, 0.0, 1.0, [](double t) { return t; });
  const auto q = srvf_transform(f);
  for (double v : q.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("srvf of t^2 matches sqrt(2t)") {
  auto f = make_sample(101, 0.0, 1.0, [](double t) { return t * t; });
  const auto q = srvf_transform(f);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < q.values.size(); ++j) {
    worst = std::max(worst,
                     std::fabs(q.values[j] - std::sqrt(2.0 * f.grid.t(j))));
  }
  CHECK(worst <= 2e-2);
}

TEST_CASE("srvf rejects non-finite values") {
  auto f = make_sample(11, 0.0, 1.0, [](double t) { return t; });
  f.values[5] = std::nan("");
  CHECK_THROWS_AS(srvf_transform(f), invalid_input_error);
}

TEST_CASE("srvf_inverse trivia") {
  SrvfSample q;
  q.grid = Grid{21, 0.0, 1.0};
  q.values.assign(21, 0.0);
  q.f0 = 5.0;
  for (double v : srvf_inverse(q).values) CHECK(v == 5.0);

  q.values.assign(21, 1.0);
  q.f0 = 0.0;
  const auto f = srvf_inverse(q);
  for (std::size_t j = 0; j < 21; ++j) {
    CHECK(f.values[j] == doctest::Approx(q.grid.t(j)).epsilon(1e-12));
  }
}

TEST_CASE("srvf round-trip on sin(2 pi t)") {
  auto f = make_sample(201, 0.0, 1.0,
                       [](double t) { return std::sin(2.0 * kPi * t); });
  const auto back = srvf_inverse(srvf_transform(f));
  double worst = 0.0;
  for (std::size_t j = 0; j < f.values.size(); ++j) {
    worst = std::max(worst, std::fabs(back.values[j] - f.values[j]));
  }
  CHECK(worst <= 1e-2);

  // error decreases with resolution
  auto f2 = make_sample(801, 0.0, 1.0,
                        [](double t) { return std::sin(2.0 * kPi * t); });
  const auto back2 = srvf_inverse(srvf_transform(f2));
  double worst2 = 0.0;
  for (std::size_t j = 0; j < f2.values.size(); ++j) {
    worst2 = std::max(worst2, std::fabs(back2.values[j] - f2.values[j]));
  }
  CHECK(worst2 < worst);
}

TEST_CASE("box_smooth") {
  FunctionSample f;
  f.grid = Grid{11, 0.0, 1.0};
  f.values.assign(11, 0.0);
  f.values[5] = 1.0;

  SUBCASE("passes = 0 is identity") {
    const auto out = box_smooth(f, SmoothingConfig{3, 0});
    CHECK(out.values == f.values);
  }
  SUBCASE("impulse spreads to 1/3") {
    const auto out = box_smooth(f, SmoothingConfig{3, 1});
    for (std::size_t j = 4; j <= 6; ++j) {
      CHECK(out.values[j] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    CHECK(out.values[3] == 0.0);
  }
  SUBCASE("constants are fixed points") {
    f.values.assign(11, 4.0);
    const auto out = box_smooth(f, SmoothingConfig{5, 3});
    for (double v : out.values) CHECK(v == doctest::Approx(4.0));
  }
  SUBCASE("even or oversized windows rejected") {
    CHECK_THROWS_AS(box_smooth(f, SmoothingConfig{4, 1}), invalid_input_error);
    CHECK_THROWS_AS(box_smooth(f, SmoothingConfig{13, 1}),
                    invalid_input_error);
  }
}

TEST_CASE("resample") {
  auto lin = make_sample(11, 0.0, 1.0, [](double t) { return t; });
  const auto up = resample(lin, 57);
  for (std::size_t j = 0; j < 57; ++j) {
    CHECK(up.values[j] == doctest::Approx(up.grid.t(j)).epsilon(1e-12));
  }

  auto quad = make_sample(11, 0.0, 1.0, [](double t) { return t * t; });
  const auto fine = resample(quad, 101);
  double worst = 0.0;
  for (std::size_t j = 0; j < 101; ++j) {
    const double t = fine.grid.t(j);
    worst = std::max(worst, std::fabs(fine.values[j] - t * t));
  }
  // Analytic interpolation bound h^2 |f''| / 8 = 2.5e-3, met with equality at
  // cell midpoints; leave headroom for the last-ulp rounding of the overshoot.
  CHECK(worst <= 2.5e-3 + 1e-12);

  CHECK(resample(quad, 11).values == quad.values);
  CHECK_THROWS_AS(resample(quad, 2), invalid_input_error);
}

TEST_CASE("l2 quadrature") {
  const Grid grid{201, 0.0, 1.0};
  std::vector<double> ones(201, 1.0);
  CHECK(l2_inner(ones, ones, grid) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l2_norm(std::vector<double>(201, 0.0), grid) == 0.0);

  std::vector<double> s(201);
  for (std::size_t j = 0; j < 201; ++j) s[j] = std::sin(2.0 * kPi * grid.t(j));
  const double n = l2_norm(s, grid);
  CHECK(n * n == doctest::Approx(0.5).epsilon(2e-4));

  CHECK_THROWS_AS(l2_inner(ones, s, Grid{5, 0.0, 1.0}), invalid_input_error);

  // Cauchy-Schwarz on a fixed pair
  std::vector<double> c(201);
  for (std::size_t j = 0; j < 201; ++j) c[j] = std::cos(3.0 * grid.t(j));
  CHECK(std::fabs(l2_inner(s, c, grid)) <=
        l2_norm(s, grid) * l2_norm(c, grid) * (1.0 + 1e-12));
}

TEST_CASE("cumtrapz endpoints") {
  std::vector<double> v{0.0, 1.0, 2.0, 3.0, 4.0};
  const auto acc = cumtrapz(v, 0.25);
  CHECK(acc.front() == 0.0);
  CHECK(acc.back() == doctest::Approx(trapz(v, 0.25)).epsilon(1e-15));
}
