#include <catch2/catch_amalgamated.hpp>

#include "renact/geometry.hpp"
#include "renact/quadrature.hpp"
#include "test_support.hpp"

using namespace renact;
using Catch::Approx;

TEST_CASE("ball volumes: closed forms and gamma form") {
  CHECK(geometry::ball_volume(1.0, 3) == Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
  CHECK(geometry::ball_volume(0.0, 3) == 0.0);
  CHECK(geometry::ball_volume(2.0, 3) == Approx(33.510321638291128).epsilon(1e-12));
  CHECK(geometry::ball_volume(1.0, 1) == Approx(2.0));
  CHECK(geometry::ball_volume(1.0, 2) == Approx(std::numbers::pi));
  // gamma-function form beyond d = 3
  CHECK(geometry::ball_volume(1.0, 4) ==
        Approx(std::numbers::pi * std::numbers::pi / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(geometry::ball_volume(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(geometry::ball_volume(-1.0, 3), std::invalid_argument);
}

TEST_CASE("lens volume: endpoints, contact value, monotonicity") {
  CHECK(geometry::lens_volume(1.1, 2.0) == Approx(0.0670206432765823).epsilon(1e-10));
  CHECK(geometry::lens_volume(1.1, 2.2) == 0.0);
  CHECK(geometry::lens_volume(1.1, 0.0) ==
        Approx(geometry::ball_volume(1.1)).epsilon(1e-14));
  CHECK_THROWS_AS(geometry::lens_volume(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(geometry::lens_volume(1.0, -0.5), std::invalid_argument);

  // nonincreasing and continuous in the distance
  double prev = geometry::lens_volume(1.1, 0.0);
  for (int i = 1; i <= 400; ++i) {
    const double s = 2.4 * i / 400.0;
    const double v = geometry::lens_volume(1.1, s);
    CHECK(v <= prev + 1e-14);
    prev = v;
  }

  // V_ov identity at rho = R + r, s = 2R, for random radii
  mc::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const double R = rng.uniform(0.5, 2.0);
    const double r = R * rng.uniform(0.02, 0.4);
    const double vov = 2.0 * std::numbers::pi / 3.0 * r * r * (3.0 * R + 2.0 * r);
    CHECK(geometry::lens_volume(R + r, 2.0 * R) == Approx(vov).epsilon(1e-12));
  }
}

TEST_CASE("corona volume and the shell fraction") {
  CHECK(geometry::corona_volume(1.0, 0.1) ==
        Approx(4.0 * std::numbers::pi / 3.0 * (1.331 - 0.729)).epsilon(1e-13));
  CHECK(geometry::epsilon_shell(0.1) == Approx(0.07525).epsilon(1e-14));
  CHECK_THROWS_AS(geometry::corona_volume(0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(geometry::corona_volume(1.0, 0.0), std::invalid_argument);

  // corona(R, r) = |B(0,2R)| * eps(r/R), algebraic identity
  mc::Rng rng(2);
  double prev = 0.0;
  for (int i = 1; i <= 30; ++i) {
    const double R = rng.uniform(0.5, 2.0);
    const double r = R * rng.uniform(0.01, 0.6);
    CHECK(geometry::corona_volume(R, r) ==
          Approx(geometry::ball_volume(2.0 * R) * geometry::epsilon_shell(r / R))
              .epsilon(1e-12));
    // monotone increasing in r at fixed R = 1
    const double rr = i / 31.0 * 0.9;
    const double c = geometry::corona_volume(1.0, rr);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("periodic distance: wraparound, symmetry, triangle inequality") {
  const std::vector<double> a{9.5, 0.0, 0.0}, b{0.5, 0.0, 0.0};
  CHECK(geometry::periodic_distance(a, b, 10.0) == Approx(1.0));
  CHECK(geometry::periodic_distance(a, a, 10.0) == 0.0);
  const std::vector<double> c{5.0, 0.0, 0.0}, d{0.0, 0.0, 0.0};
  CHECK(geometry::periodic_distance(c, d, 10.0) == Approx(5.0));
  const std::vector<double> bad{1.0, 2.0};
  CHECK_THROWS_AS(geometry::periodic_distance(a, bad, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(geometry::periodic_distance(a, b, 0.0), std::invalid_argument);

  mc::Rng rng(3);
  const double L = 7.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(3), y(3), z(3);
    for (int k = 0; k < 3; ++k) {
      x[k] = rng.uniform(0.0, L);
      y[k] = rng.uniform(0.0, L);
      z[k] = rng.uniform(0.0, L);
    }
    const double xy = geometry::periodic_distance(x, y, L);
    const double yx = geometry::periodic_distance(y, x, L);
    const double xz = geometry::periodic_distance(x, z, L);
    const double zy = geometry::periodic_distance(z, y, L);
    CHECK(xy == yx);
    CHECK(xy <= xz + zy + 1e-12);
    CHECK(xy <= std::sqrt(3.0) / 2.0 * L + 1e-12);
  }
}

TEST_CASE("k-intersection: exact short-circuits") {
  // identical balls collapse to a single exact ball volume
  std::vector<geometry::BallSpec> same(3, {{1.0, 2.0, 3.0}, 1.0});
  auto est = geometry::k_intersection_volume(same);
  CHECK(est.value == Approx(geometry::ball_volume(1.0)).epsilon(1e-14));
  CHECK(est.stderr_ == 0.0);

  // disjoint pair inside a larger list forces exact zero
  std::vector<geometry::BallSpec> disjoint{{{0, 0, 0}, 1.0}, {{2.5, 0, 0}, 1.0}};
  est = geometry::k_intersection_volume(disjoint);
  CHECK(est.value == 0.0);
  CHECK(est.stderr_ == 0.0);

  // containment reduction: tiny ball inside a big one
  std::vector<geometry::BallSpec> contained{{{0, 0, 0}, 2.0}, {{0.1, 0, 0}, 0.3}};
  est = geometry::k_intersection_volume(contained);
  CHECK(est.value == Approx(geometry::ball_volume(0.3)).epsilon(1e-14));

  CHECK_THROWS_AS(geometry::k_intersection_volume({}), std::invalid_argument);
}

TEST_CASE("k-intersection sampler agrees with the pair closed form") {
  mc::Rng rng(4);
  int fails = 0;
  for (int i = 0; i < 100; ++i) {
    const double rho = rng.uniform(0.5, 1.5);
    const double s = rng.uniform(0.0, 1.9) * rho;
    std::vector<geometry::BallSpec> balls{{{0, 0, 0}, rho}, {{s, 0, 0}, rho}};
    geometry::KIntersectOptions opt;
    opt.samples = 1u << 15;
    opt.seed = rng.next_u64();
    opt.force_mc = true;
    const auto est = geometry::k_intersection_volume(balls, opt);
    const double exact = geometry::lens_volume(rho, s);
    if (std::abs(est.value - exact) > 3.0 * est.stderr_ + 1e-12) ++fails;
  }
  // 3-sigma bands admit a few statistical excursions out of 100
  CHECK(fails <= 2);
}

TEST_CASE("k-intersection vs grid quadrature for a triple") {
  std::vector<geometry::BallSpec> balls{
      {{0, 0, 0}, 1.1}, {{1.4, 0, 0}, 1.1}, {{0.7, 1.2, 0}, 1.1}};
  geometry::KIntersectOptions opt;
  opt.samples = 1u << 19;
  opt.seed = 99;
  const auto est = geometry::k_intersection_volume(balls, opt);
  const double grid = quadrature::grid_intersection_volume(balls, 0.004);
  CHECK(std::abs(est.value - grid) <= 3.0 * est.stderr_ + 2e-4);

  // empty triple: pairwise overlapping but no common point
  std::vector<geometry::BallSpec> empty3{
      {{0, 0, 0}, 1.1}, {{2.0, 0, 0}, 1.1}, {{1.0, std::sqrt(3.0), 0}, 1.1}};
  const auto zero = geometry::k_intersection_volume(empty3, opt);
  CHECK(zero.value == 0.0);
  CHECK(quadrature::grid_intersection_volume(empty3, 0.004) == 0.0);
}

TEST_CASE("two-ball overlap with unequal radii") {
  CHECK(geometry::two_ball_overlap(1.0, 2.0, 3.5) == 0.0);
  CHECK(geometry::two_ball_overlap(1.0, 2.0, 0.5) ==
        Approx(geometry::ball_volume(1.0)).epsilon(1e-14));
  // equal radii reduces to the lens
  CHECK(geometry::two_ball_overlap(1.1, 1.1, 2.0) ==
        Approx(geometry::lens_volume(1.1, 2.0)).epsilon(1e-12));
  // sanity against the grid for a genuinely asymmetric case
  std::vector<geometry::BallSpec> balls{{{0, 0, 0}, 1.0}, {{1.2, 0, 0}, 0.6}};
  const double grid = quadrature::grid_intersection_volume(balls, 0.003);
  CHECK(geometry::two_ball_overlap(1.0, 0.6, 1.2) == Approx(grid).margin(2e-4));
}
