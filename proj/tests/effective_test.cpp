#include <catch2/catch_amalgamated.hpp>

#include "renact/effective.hpp"
#include "test_support.hpp"

using namespace renact;
using Catch::Approx;
using model::Vec3;
using test_support::box_center;
using test_support::colloid_free;
using test_support::penetrable_free;

TEST_CASE("W_2 penetrable: contact value, range, monotonicity") {
  auto p = penetrable_free(0.1);
  const Vec3 c = box_center(p);

  std::vector<Vec3> contact{c, {c[0] + 2.0, c[1], c[2]}};
  const auto w2 = effective::w_J_penetrable(contact, p);
  CHECK(w2.value == Approx(-0.00670206432765823).epsilon(1e-10));
  CHECK(w2.stderr_ == 0.0);

  std::vector<Vec3> far{c, {c[0] + 2.0 * (p.R + p.r), c[1], c[2]}};
  CHECK(effective::w_J_penetrable(far, p).value == 0.0);

  double prev = -1e9;
  for (int i = 0; i <= 20; ++i) {
    std::vector<Vec3> xs{c, {c[0] + 2.0 + 0.2 * i / 20.0, c[1], c[2]}};
    const double w = effective::w_J_penetrable(xs, p).value;
    CHECK(w <= 0.0);
    CHECK(w >= prev - 1e-15);  // |W_2| nonincreasing in distance
    prev = w;
  }

  auto colloid = colloid_free(0.1);
  CHECK_THROWS_AS(effective::w_J_penetrable(contact, colloid), std::invalid_argument);
  CHECK_THROWS_AS(effective::w_J_penetrable(std::vector<Vec3>{c}, p),
                  std::invalid_argument);
}

TEST_CASE("W_k vanishes for k >= 3 below the ratio threshold") {
  auto p = penetrable_free(0.1);  // r/R = 0.1 < (2/3) sqrt(3) - 1
  const Vec3 c = box_center(p);
  // pairwise distance exactly 2R: the three exclusion balls share no point
  std::vector<Vec3> tri{{c[0], c[1], c[2]},
                        {c[0] + 2.0, c[1], c[2]},
                        {c[0] + 1.0, c[1] + std::sqrt(3.0), c[2]}};
  // smallest enclosing ball of the centers has radius 2/sqrt(3) > R + r
  const double circumradius = 2.0 / std::sqrt(3.0);
  CHECK(circumradius > p.R + p.r);
  const auto w3 = effective::w_J_penetrable(tri, p, 1u << 16, 5);
  CHECK(w3.value == 0.0);

  // a tetrahedron at pairwise 2R likewise
  const double s = 2.0 / std::sqrt(2.0);
  std::vector<Vec3> tet{{c[0] + s / 2, c[1] + s / 2, c[2] + s / 2},
                        {c[0] + s / 2, c[1] - s / 2, c[2] - s / 2},
                        {c[0] - s / 2, c[1] + s / 2, c[2] - s / 2},
                        {c[0] - s / 2, c[1] - s / 2, c[2] + s / 2}};
  CHECK(effective::w_J_penetrable(tet, p, 1u << 16, 6).value == 0.0);
}

TEST_CASE("W_3 is positive when the exclusion balls genuinely overlap") {
  auto p = penetrable_free(0.1);
  const Vec3 c = box_center(p);
  std::vector<Vec3> tri{{c[0], c[1], c[2]},
                        {c[0] + 1.0, c[1], c[2]},
                        {c[0] + 0.5, c[1] + 0.8, c[2]}};
  const auto w3 = effective::w_J_penetrable(tri, p, 1u << 17, 7);
  CHECK(w3.value > 0.0);  // (-1)^{k-1} with k = 3
  CHECK(w3.stderr_ > 0.0);
}

TEST_CASE("cloud-series W agrees with the analytic route") {
  auto p = penetrable_free(0.1);
  const Vec3 c = box_center(p);
  std::vector<Vec3> contact{c, {c[0] + 2.0, c[1], c[2]}};
  const auto analytic = effective::w_J_penetrable(contact, p);
  const auto mc_w = effective::w_J_cloud_series(contact, p, 3, 1u << 17, 9);
  CHECK(std::abs(mc_w.value - analytic.value) <= 3.0 * mc_w.stderr_);
  CHECK(mc_w.value < 0.0);  // depletion attraction

  // zero solvent activity: nu vanishes identically
  auto p0 = penetrable_free(0.0);
  CHECK(effective::w_J_cloud_series(contact, p0, 3, 1u << 10, 9).value == 0.0);

  // colloid with the small-small interaction forced off reproduces the
  // penetrable value (all k >= 2 cloud terms vanish identically)
  auto forced = colloid_free(0.1);
  forced.force_ideal_solvent = true;
  const auto forced_w = effective::w_J_cloud_series(contact, forced, 3, 1u << 17, 10);
  CHECK(std::abs(forced_w.value - analytic.value) <= 3.0 * forced_w.stderr_);
}

TEST_CASE("colloid cloud-series W picks up a genuine two-point correction") {
  auto p = colloid_free(0.3);
  const Vec3 c = box_center(p);
  std::vector<Vec3> contact{c, {c[0] + 2.0, c[1], c[2]}};
  const auto w_pair = effective::w_J_cloud_series(contact, p, 2, 1u << 17, 31);
  const auto analytic_k1 = effective::w_J_penetrable(contact, penetrable_free(0.3));
  // the size-2 cloud term is nonzero for a hard solvent, so the series must
  // differ from the pure k = 1 value by more than noise
  CHECK(std::abs(w_pair.value - analytic_k1.value) > 3.0 * w_pair.stderr_);
}

TEST_CASE("zhat closed form, series, and ratio modes") {
  auto p = penetrable_free(0.1, 1.0);
  const auto zh = effective::zhat_penetrable(p);
  CHECK(zh.value == Approx(std::exp(-0.1 * geometry::ball_volume(1.1))).epsilon(1e-12));
  CHECK(zh.value == Approx(0.5726228529569878).epsilon(1e-10));

  auto p0 = penetrable_free(0.0, 0.7);
  CHECK(effective::zhat_penetrable(p0).value == Approx(0.7).epsilon(1e-14));

  // series truncated at n = 1 equals the closed form (ideal solvent)
  auto forced = colloid_free(0.1, 1.0);
  forced.force_ideal_solvent = true;
  effective::ZhatSeriesOptions opt;
  opt.n_max = 2;
  const auto series = effective::zhat_colloid_series(forced, opt);
  CHECK(series.value == Approx(zh.value).epsilon(1e-12));

  // colloid z_r = 0: no solvent, zhat = z_R
  auto c0 = colloid_free(0.0, 0.4);
  CHECK(effective::zhat_colloid_series(c0, opt).value == Approx(0.4).epsilon(1e-14));

  // periodic-box ratio form reduces to the homogeneous closed form
  auto per = penetrable_free(0.1, 1.0);
  per.box = {6.0, geometry::Boundary::periodic, 3};
  const auto ratio = effective::zhat_finite_volume_ratio(per, box_center(per));
  CHECK(ratio.value == Approx(zh.value).epsilon(1e-12));
}

TEST_CASE("free-boundary ratio zhat is larger near the wall") {
  auto p = penetrable_free(0.1, 1.0);
  p.box = {12.0, geometry::Boundary::free_space, 3};
  double prev = std::numeric_limits<double>::infinity();
  // walk the probe from near the wall into the bulk along one axis
  for (double t : {0.2, 0.5, 0.8, 1.05, 2.0, 6.0}) {
    const Vec3 x{t, 6.0, 6.0};
    const auto z = effective::zhat_finite_volume_ratio(p, x);
    CHECK(z.value <= prev + 1e-12);
    prev = z.value;
  }
  // bulk value equals the homogeneous closed form
  const auto bulk = effective::zhat_finite_volume_ratio(p, {6.0, 6.0, 6.0});
  CHECK(bulk.value == Approx(effective::zhat_penetrable(p).value).epsilon(1e-12));
}

TEST_CASE("colloid ratio mode is finite and solvent-suppressed") {
  auto p = colloid_free(0.05, 1.0);
  p.box = {6.0, geometry::Boundary::periodic, 3};
  effective::ZhatRatioOptions opt;
  opt.samples = 1u << 14;
  opt.n2_max = 25;
  opt.seed = 5;
  const auto z = effective::zhat_finite_volume_ratio(p, box_center(p), opt);
  CHECK(z.value > 0.0);
  CHECK(z.value < 1.0);  // excluding volume can only lower the partition function
}
