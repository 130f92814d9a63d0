#include <catch2/catch_amalgamated.hpp>

#include "renact/convergence.hpp"
#include "renact/effective.hpp"
#include "test_support.hpp"

using namespace renact;
using Catch::Approx;
using test_support::colloid_free;
using test_support::penetrable_free;

TEST_CASE("two-constant penetrable conditions") {
  auto p = penetrable_free(0.0, 0.0);
  CHECK(convergence::check_col1(p, 0.0, 0.5, 0.5).satisfied);

  auto q = penetrable_free(0.1);
  CHECK_FALSE(convergence::check_col1(q, 0.01, 0.0, 0.0).satisfied);

  // the constructed witness passes exactly when the easy bound holds
  for (double zr : {0.0, 0.02, 0.05, 0.1, 0.2, 0.4}) {
    auto pp = penetrable_free(zr);
    const auto easy = convergence::max_zhat_easy(pp);
    const auto at_bound = convergence::check_col1(pp, easy.zhat_bound * 0.999,
                                                  easy.witness_a, easy.witness_A);
    CHECK(at_bound.satisfied);
    const auto beyond = convergence::check_col1(pp, easy.zhat_bound * 1.05,
                                                easy.witness_a, easy.witness_A);
    CHECK_FALSE(beyond.satisfied);
  }
}

TEST_CASE("frozen closed-form bounds at the reference point") {
  auto p = penetrable_free(0.1);
  const auto easy = convergence::max_zhat_easy(p);
  CHECK(easy.zhat_bound == Approx(0.0083647711731658971).epsilon(1e-12));
  CHECK(easy.zR_bound == Approx(0.0146078193176726247).epsilon(1e-12));
  CHECK(convergence::max_zR_kp(p) == Approx(0.0062863071689262411).epsilon(1e-12));
  CHECK(easy.zR_bound / convergence::max_zR_kp(p) ==
        Approx(2.3237520733762958).epsilon(1e-12));

  // z_r = 0: both bounds collapse to the classical 1/(e |B(0,2R)|)
  auto p0 = penetrable_free(0.0);
  const double classical = 1.0 / (std::numbers::e * geometry::ball_volume(2.0));
  CHECK(convergence::max_zhat_easy(p0).zhat_bound == Approx(classical).epsilon(1e-13));
  CHECK(convergence::max_zR_kp(p0) == Approx(classical).epsilon(1e-13));

  // monotone decreasing in z_r
  double prev = 1e9;
  for (int i = 0; i <= 20; ++i) {
    auto pi = penetrable_free(0.3 * i / 20.0);
    const double b = convergence::max_zhat_easy(pi).zhat_bound;
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("improvement ratio simplification and sweep behavior") {
  auto p = penetrable_free(0.1);
  const auto easy = convergence::max_zhat_easy(p);
  const double ratio = easy.zR_bound / convergence::max_zR_kp(p);
  CHECK(ratio == Approx(convergence::improvement_ratio_closed_form(p)).epsilon(1e-10));

  std::vector<double> grid(11);
  for (int i = 0; i < 11; ++i) grid[i] = 0.1 * i / 10.0;
  const auto rows = convergence::region_sweep(p, grid, /*include_pair=*/true);
  REQUIRE(rows.size() == 11);
  CHECK(rows.front().ratio == Approx(1.0).epsilon(1e-12));
  double prev = 0.0;
  for (const auto& row : rows) {
    CHECK(row.ratio >= 1.0 - 1e-12);
    CHECK(row.ratio >= prev - 1e-12);
    prev = row.ratio;
    CHECK(row.zhat_easy == Approx(convergence::max_zhat_easy(
        [&] { auto q = p; q.zr = row.zr; return q; }()).zhat_bound).epsilon(1e-13));
    // the non-rigorous pair-potential route applies at r/R = 0.1 and beats both
    CHECK(row.zR_pair > row.zR_easy);
  }
}

TEST_CASE("KP witness bound property (quick)") {
  mc::Rng rng(17);
  for (int i = 0; i < 30; ++i) {
    auto p = penetrable_free(rng.uniform(0.0, 0.3));
    const double a = rng.uniform(0.01, 3.0), A = rng.uniform(0.01, 3.0);
    CHECK(convergence::max_zR_kp_witness(p, a, A) <=
          convergence::max_zR_kp(p) + 1e-12);
  }
}

TEST_CASE("colloid conditions: trivial, tight, and strictness") {
  auto p = colloid_free(0.0);
  CHECK(convergence::check_hs(p, 0.0, 0.0, 0.0, 0.0, /*strict=*/false).satisfied);
  // strict variant rejects the all-zero witness at zero activities only
  // through the strict inequalities on the zhat terms; zhat = 0 keeps them 0 < 0 false
  CHECK_FALSE(convergence::check_hs(p, 0.0, 0.0, 0.0, 0.0, /*strict=*/true).satisfied);

  // tightness: |B(0,2r)| z_r = 1/e, b = 0, c = 1 makes the first condition
  // an equality (x e^{-x} peaks at x = 1)
  auto tight = colloid_free(1.0 / (std::numbers::e * geometry::ball_volume(0.2)));
  const auto w = convergence::check_hs(tight, 0.0, 1.0, 0.0, 1.0, false);
  const double lhs = geometry::ball_volume(0.2) * tight.zr * std::exp(0.0 + 1.0);
  CHECK(lhs == Approx(1.0).epsilon(1e-12));
  CHECK(w.satisfied);
}

TEST_CASE("witness search: construction, degenerate cases, precondition") {
  // z_r = 0 with a small zhat: trivially satisfiable
  auto p0 = colloid_free(0.0);
  const auto w0 = convergence::witness_search_hs(p0, 1e-4);
  CHECK(w0.satisfied);

  // zhat = 0 always admits a witness under the minimal condition
  auto p1 = colloid_free(0.05);
  CHECK(convergence::witness_search_hs(p1, 0.0).satisfied);

  // desk case: found witness re-verifies through check_hs
  const auto probe = convergence::witness_search_hs(p1, 0.0);
  const double zhat = 0.5 * probe.admissible_zhat;
  const auto w = convergence::witness_search_hs(p1, zhat);
  REQUIRE(w.satisfied);
  const auto recheck = convergence::check_hs(p1, zhat, w.constants.at("a"),
                                             w.constants.at("b"), w.constants.at("c"),
                                             /*strict=*/true);
  CHECK(recheck.satisfied);

  // minimal-condition violation is reported, not thrown
  auto bad = colloid_free(2.0 / (std::numbers::e * geometry::ball_volume(0.2)));
  const auto wb = convergence::witness_search_hs(bad, 1e-6);
  CHECK(wb.precondition_failed);
  CHECK_FALSE(wb.satisfied);
}

TEST_CASE("abstract two-function conditions reduce to the concrete forms") {
  auto p = penetrable_free(0.1);
  const double zhat = 0.004;
  const auto easy = convergence::max_zhat_easy(p);
  const double A = easy.witness_A, a = easy.witness_a;
  const auto lhs = convergence::abstract_suff_penetrable(p, zhat, A, a, 1u << 18, 23);
  const double closed1 = geometry::ball_volume(2.0) * std::exp(A) * zhat +
                         geometry::corona_volume(1.0, 0.1) * std::exp(a) * p.zr;
  const double closed2 = geometry::corona_volume(1.0, 0.1) * std::exp(A) * zhat;
  CHECK(std::abs(lhs.lhs1.value - closed1) <= 3.0 * lhs.lhs1.stderr_);
  CHECK(std::abs(lhs.lhs2.value - closed2) <= 3.0 * lhs.lhs2.stderr_);
  CHECK(lhs.lhs1.stderr_ > 0.0);
}

TEST_CASE("pair-potential route gates on the ratio threshold") {
  auto p = penetrable_free(0.1);
  CHECK(convergence::max_zhat_pair_potential(p) > 0.0);
  auto wide = p;
  wide.r = 0.2;  // r/R above (2/3) sqrt(3) - 1: multi-body terms survive
  CHECK(convergence::max_zhat_pair_potential(wide) == 0.0);
}
