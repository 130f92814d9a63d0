#include <catch2/catch_amalgamated.hpp>

#include "renact/graphs.hpp"
#include "renact/interactions.hpp"
#include "test_support.hpp"

using namespace renact;
using Catch::Approx;
using model::Cloud;
using model::Configuration;
using model::SpeciesKind;
using model::Vec3;
using test_support::box_center;
using test_support::colloid_free;
using test_support::penetrable_free;
using test_support::random_in_ball;

namespace {

// Independent route for the Ursell function: the literal sum over connected
// graphs from the enumeration, as slow as it is honest.
double ursell_by_graph_sum(std::span<const Vec3> pts, const model::MixtureParams& p,
                           SpeciesKind kind) {
  const int n = static_cast<int>(pts.size());
  if (n == 1) return 1.0;
  std::vector<double> f(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      f[i * n + j] = model::mayer_f(pts[i], kind, pts[j], kind, p);
  double total = 0.0;
  for (const auto& g : graphs::enumerate_connected(n)) {
    double w = 1.0;
    for (auto [a, b] : g.edges) w *= f[(a - 1) * n + (b - 1)];
    total += w;
  }
  return total;
}

}  // namespace

TEST_CASE("mayer_f species table") {
  auto p = penetrable_free(0.1);
  const Vec3 a = box_center(p);
  Vec3 b = a;
  b[0] += 1.5;
  CHECK(model::mayer_f(a, SpeciesKind::large, b, SpeciesKind::large, p) == -1.0);
  CHECK(model::mayer_f(a, SpeciesKind::small, b, SpeciesKind::small, p) == 0.0);
  Vec3 c = a;
  c[0] += p.R + p.r;  // exactly at the exclusion boundary: allowed
  CHECK(model::mayer_f(a, SpeciesKind::large, c, SpeciesKind::small, p) == 0.0);
  c[0] -= 1e-9;
  CHECK(model::mayer_f(a, SpeciesKind::large, c, SpeciesKind::small, p) == -1.0);

  auto q = colloid_free(0.1);
  Vec3 d = a;
  d[0] += 0.15;  // < 2r = 0.2
  CHECK(model::mayer_f(a, SpeciesKind::small, d, SpeciesKind::small, q) == -1.0);
}

TEST_CASE("zeta and the corona surrogate") {
  auto p = penetrable_free(0.1);
  const Vec3 x = box_center(p);
  Vec3 at_R = x;
  at_R[0] += p.R;
  CHECK(model::zeta(x, Cloud{{at_R}}, p) == -1.0);
  CHECK(model::zeta_tilde(x, Cloud{{at_R}}, p) == -1.0);

  Cloud far;
  for (int i = 0; i < 3; ++i) {
    Vec3 y = x;
    y[1] += (p.R + p.r) + 0.1 * (i + 1);
    far.points.push_back(y);
  }
  CHECK(model::zeta(x, far, p) == 0.0);

  Vec3 deep = x;
  deep[0] += p.R - 2.0 * p.r;  // inside the hard ball but below the corona
  CHECK(model::zeta(x, Cloud{{deep}}, p) == -1.0);
  CHECK(model::zeta_tilde(x, Cloud{{deep}}, p) == 0.0);

  // |zeta| in {0,1}, |zeta| <= sum |f|, |zeta_tilde| <= |zeta| on random input
  mc::Rng rng(11);
  for (int it = 0; it < 1000; ++it) {
    Cloud y;
    const int k = 1 + static_cast<int>(rng.uniform_index(3));
    for (int i = 0; i < k; ++i)
      y.points.push_back(random_in_ball(rng, x, 1.5 * (p.R + p.r)));
    const double z = model::zeta(x, y, p);
    CHECK((z == 0.0 || z == -1.0));
    double sum_f = 0.0;
    for (const auto& pt : y.points)
      sum_f += std::abs(model::mayer_f(x, SpeciesKind::large, pt, SpeciesKind::small, p));
    CHECK(std::abs(z) <= sum_f + 1e-15);
    if (k == 1)
      CHECK(std::abs(model::zeta_tilde(x, y, p)) <= std::abs(z));
  }
}

TEST_CASE("Ursell function: conventions and the graph-sum route") {
  auto colloid = colloid_free(0.1);
  const Vec3 c = box_center(colloid);

  std::vector<Vec3> one{c};
  CHECK(interactions::ursell_phi_T(one, colloid) == 1.0);

  std::vector<Vec3> two{c, {c[0] + 0.15, c[1], c[2]}};
  CHECK(interactions::ursell_phi_T(two, colloid, SpeciesKind::small) ==
        model::mayer_f(two[0], SpeciesKind::small, two[1], SpeciesKind::small, colloid));

  std::vector<Vec3> tri{c, {c[0] + 0.05, c[1], c[2]}, {c[0], c[1] + 0.05, c[2]}};
  CHECK(interactions::ursell_phi_T(tri, colloid, SpeciesKind::small) == 2.0);

  CHECK_THROWS_AS(interactions::ursell_phi_T(std::vector<Vec3>(8, c), colloid),
                  std::invalid_argument);

  // the subset recursion equals the literal connected-graph sum
  mc::Rng rng(12);
  for (int it = 0; it < 200; ++it) {
    const int n = 2 + static_cast<int>(rng.uniform_index(4));  // 2..5
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i)
      pts.push_back(random_in_ball(rng, c, 0.35));  // dense in 2r-units
    const double fast = interactions::ursell_phi_T(pts, colloid, SpeciesKind::small);
    const double slow = ursell_by_graph_sum(pts, colloid, SpeciesKind::small);
    CHECK(fast == Approx(slow).margin(1e-12));
    if (n == 3) CHECK(std::abs(fast) <= 4.0 + 1e-12);  // #C_3 bound, hard core
  }
}

TEST_CASE("phi*^T: reductions and the two-graph example") {
  auto p = penetrable_free(0.1);
  const Vec3 c = box_center(p);

  // m = 2, r = 0, overlapping hard cores: reduces to f = -1
  Configuration two;
  two.large = {c, {c[0] + 1.0, c[1], c[2]}};
  CHECK(interactions::phi_star_T(two, p) == -1.0);

  // m = 2, r = 1, large spheres at contact, cloud point in both coronas
  Configuration star;
  star.large = {{c[0] - 1.0, c[1], c[2]}, {c[0] + 1.0, c[1], c[2]}};
  star.clouds = {Cloud{{{c[0], c[1] + 0.35, c[2]}}}};
  CHECK(interactions::phi_star_T(star, p) == 1.0);

  // m = 1, r = 1: class is empty
  Configuration lonely;
  lonely.large = {c};
  lonely.clouds = {Cloud{{{c[0] + 1.0, c[1], c[2]}}}};
  CHECK(interactions::phi_star_T(lonely, p) == 0.0);

  // m = 1, r = 0: single-vertex Ursell convention
  Configuration single;
  single.large = {c};
  CHECK(interactions::phi_star_T(single, p) == 1.0);
}

TEST_CASE("tree-graph inequality on random configurations (spot check)") {
  auto p = penetrable_free(0.05);
  const Vec3 c = box_center(p);
  mc::Rng rng(13);
  int active = 0;
  for (int it = 0; it < 500; ++it) {
    Configuration cfg;
    const int m = 2 + static_cast<int>(rng.uniform_index(2));
    const int r = 1 + static_cast<int>(rng.uniform_index(2));
    for (int i = 0; i < m; ++i)
      cfg.large.push_back(random_in_ball(rng, c, 2.0 * (p.R + p.r)));
    for (int k = 0; k < r; ++k)
      cfg.clouds.push_back(Cloud{{random_in_ball(rng, c, 2.5 * (p.R + p.r))}});
    const double lhs = std::abs(interactions::phi_star_T(cfg, p));
    const double rhs = interactions::tree_graph_majorant(cfg, p);
    if (lhs > 0.0) ++active;
    CHECK(lhs <= rhs + 1e-12);
  }
  CHECK(active > 20);
}

TEST_CASE("psi: hard cores, unit normalization, no-interaction limit") {
  auto p = penetrable_free(0.1);
  const Vec3 c = box_center(p);
  interactions::WProvider no_w = [](std::span<const int>) { return 0.0; };

  CHECK(interactions::psi(std::vector<Vec3>{c}, p, no_w) == 1.0);

  std::vector<Vec3> overlap{c, {c[0] + 1.0, c[1], c[2]}};
  CHECK(interactions::psi(overlap, p, no_w) == 0.0);

  std::vector<Vec3> far{c, {c[0] + 2.0 * (p.R + p.r) + 0.1, c[1], c[2]}};
  // W vanishes beyond the exclusion reach, f vanishes beyond 2R
  interactions::WProvider w_pair = [&](std::span<const int> J) {
    if (J.size() != 2) return 0.0;
    const double s = p.distance(far[J[0]], far[J[1]]);
    return -p.zr * geometry::lens_volume(p.R + p.r, s);
  };
  CHECK(interactions::psi(far, p, w_pair) == 1.0);
}

TEST_CASE("truncation identity: psi equals the partition sum of psi^T") {
  auto p = penetrable_free(0.07);
  const Vec3 c = box_center(p);

  // Synthetic deterministic W values exercise the combinatorial identity for
  // arbitrary interactions; the identity must hold for any consistent W.
  interactions::WProvider synthetic = [](std::span<const int> J) {
    double h = 0.13;
    for (int i : J) h = 0.31 * h + 0.017 * (i + 1);
    return h - 0.02 * static_cast<double>(J.size());
  };

  mc::Rng rng(14);
  for (int it = 0; it < 50; ++it) {
    // m = 2
    std::vector<Vec3> xs2{c, random_in_ball(rng, c, 3.0)};
    const double psi2 = interactions::psi(xs2, p, synthetic);
    const double t2 = interactions::psi_T_hypergraph(xs2, p, synthetic);
    CHECK(psi2 == Approx(t2 + 1.0).margin(1e-12));

    // m = 3: psi = psiT(123) + psiT(12) + psiT(13) + psiT(23) + 1
    std::vector<Vec3> xs3{c, random_in_ball(rng, c, 3.0), random_in_ball(rng, c, 3.0)};
    const double psi3 = interactions::psi(xs3, p, synthetic);
    double rhs = interactions::psi_T_hypergraph(xs3, p, synthetic) + 1.0;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pr : pairs) {
      std::vector<Vec3> sub{xs3[pr[0]], xs3[pr[1]]};
      rhs += interactions::psi_T_hypergraph(sub, p, synthetic);
    }
    CHECK(psi3 == Approx(rhs).margin(1e-12));
  }

  // Physical W for a configuration where the three-body term vanishes
  // (pairwise distance >= 2R at r/R = 0.1): everything is analytic.
  std::vector<Vec3> xs{{c[0], c[1], c[2]},
                       {c[0] + 2.05, c[1], c[2]},
                       {c[0] + 1.0, c[1] + 1.9, c[2]}};
  interactions::WProvider physical = [&](std::span<const int> J) {
    if (J.size() != 2) return 0.0;  // vanishing three-body regime
    const double s = p.distance(xs[J[0]], xs[J[1]]);
    return -p.zr * geometry::lens_volume(p.R + p.r, s);
  };
  const double psi3 = interactions::psi(xs, p, physical);
  double rhs = interactions::psi_T_hypergraph(xs, p, physical) + 1.0;
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pr : pairs) {
    std::vector<Vec3> sub{xs[pr[0]], xs[pr[1]]};
    rhs += interactions::psi_T_hypergraph(sub, p, physical);
  }
  CHECK(psi3 == Approx(rhs).margin(1e-12));
}

TEST_CASE("psi^T pair values") {
  auto p = penetrable_free(0.1);
  const Vec3 c = box_center(p);
  interactions::WProvider w = [&](std::span<const int>) { return 0.0; };

  std::vector<Vec3> overlap{c, {c[0] + 1.0, c[1], c[2]}};
  CHECK(interactions::psi_T_hypergraph(overlap, p, w) == -1.0);

  std::vector<Vec3> contact{c, {c[0] + 2.0, c[1], c[2]}};
  interactions::WProvider w_lens = [&](std::span<const int> J) {
    const double s = p.distance(contact[J[0]], contact[J[1]]);
    return -p.zr * geometry::lens_volume(p.R + p.r, s);
  };
  CHECK(interactions::psi_T_hypergraph(contact, p, w_lens) ==
        Approx(std::expm1(0.1 * 0.0670206432765823)).epsilon(1e-10));

  std::vector<Vec3> far{c, {c[0] + 2.0 * (p.R + p.r), c[1], c[2]}};
  interactions::WProvider w_far = [&](std::span<const int> J) {
    const double s = p.distance(far[J[0]], far[J[1]]);
    return -p.zr * geometry::lens_volume(p.R + p.r, s);
  };
  CHECK(interactions::psi_T_hypergraph(far, p, w_far) == 0.0);
}

TEST_CASE("nu sampler: penetrable one-body integral") {
  auto p = penetrable_free(0.12);
  const Vec3 x = box_center(p);
  // int zeta(x, y) dnu(y) = -z_r |B(x, R+r)|
  const auto est = interactions::nu_term_k(
      p, 1, std::span<const Vec3>(&x, 1), p.R + p.r, 1u << 16, 77, 1,
      [&](const Cloud& y) { return model::zeta(x, y, p); });
  const double expect = -p.zr * geometry::ball_volume(p.R + p.r);
  CHECK(std::abs(est.value - expect) <= 3.0 * est.stderr_);
  CHECK(est.stderr_ > 0.0);
}

TEST_CASE("stability of the effective interaction (penetrable closed forms)") {
  auto p = penetrable_free(0.08);
  const Vec3 c = box_center(p);
  mc::Rng rng(15);
  for (int it = 0; it < 40; ++it) {
    const int m = 2 + static_cast<int>(rng.uniform_index(3));  // 2..4
    std::vector<Vec3> xs;
    for (int i = 0; i < m; ++i) xs.push_back(random_in_ball(rng, c, 1.8));
    // sum_J W_J = z_r (|union B_j| - sum |B_j|), estimated by hit testing
    const double reach = p.R + p.r;
    mc::Rng inner(rng.next_u64());
    const double host = 3.0 * reach;
    std::uint64_t hits = 0;
    const std::uint64_t n = 1u << 15;
    for (std::uint64_t s = 0; s < n; ++s) {
      const Vec3 probe = random_in_ball(inner, c, host);
      for (const auto& x : xs)
        if (p.distance(probe, x) < reach) {
          ++hits;
          break;
        }
    }
    const double union_vol = geometry::ball_volume(host) * hits / n;
    const double sum_w = p.zr * (union_vol - m * geometry::ball_volume(reach));
    const double bound = -m * m * p.zr * geometry::ball_volume(reach);
    CHECK(sum_w >= bound - 1e-9);
  }
}

TEST_CASE("psi^T cloud series matches the hypergraph mode (pair, quick)") {
  auto p = penetrable_free(0.05);
  const Vec3 c = box_center(p);
  std::vector<Vec3> xs{c, {c[0] + 2.0, c[1], c[2]}};
  interactions::WProvider w = [&](std::span<const int> J) {
    const double s = p.distance(xs[J[0]], xs[J[1]]);
    return -p.zr * geometry::lens_volume(p.R + p.r, s);
  };
  const double exact = interactions::psi_T_hypergraph(xs, p, w);
  interactions::CloudSeriesOptions opt;
  opt.samples = 1u << 15;
  opt.seed = 21;
  opt.r_max = 3;
  const auto cloud = interactions::psi_T_cloud_series(xs, p, opt);
  CHECK(std::abs(cloud.estimate.value - exact) <= 3.0 * cloud.estimate.stderr_ + 1e-7);
  CHECK(cloud.terms.size() == 4);
  CHECK(cloud.terms[0].value == 0.0);  // f vanishes at contact (closed core)
}
