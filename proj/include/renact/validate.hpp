#pragma once

// The orchestrated validation battery: every numbered acceptance check with
// its tolerance pinned in code. Shared by the CLI (`validate all`) and the
// acceptance test suite.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "renact/convergence.hpp"
#include "renact/effective.hpp"
#include "renact/expansion.hpp"
#include "renact/geometry.hpp"
#include "renact/graphs.hpp"
#include "renact/interactions.hpp"
#include "renact/mc.hpp"
#include "renact/model.hpp"
#include "renact/oracle.hpp"
#include "renact/quadrature.hpp"

namespace renact::validate {

using model::MixtureParams;
using model::Vec3;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

struct ValidationReport {
  std::vector<CriterionResult> results;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

struct ValidateOptions {
  std::uint64_t seed = 42;
  int workers = 4;
  /// Scale factor on sample budgets; 1.0 matches the acceptance targets.
  double samples_scale = 1.0;
};

// Identity rows for the oracle cross-check (also the `validate oracle` CLI).
struct IdentityRow {
  std::string name;
  double lhs = 0.0, lhs_stderr = 0.0;
  double rhs = 0.0, rhs_stderr = 0.0;
  bool pass = false;
  double sigmas = 0.0;

  void judge() {
    const double band = 3.0 * std::hypot(lhs_stderr, rhs_stderr);
    const double diff = std::abs(lhs - rhs);
    sigmas = band > 0.0 ? 3.0 * diff / band : (diff == 0.0 ? 0.0 : 1e9);
    pass = diff <= band;
  }
};

/// The desk-case comparison of the expansion against the brute-force oracle:
/// log Xi, rho_R, rho_r and the free-volume identity, each at 3 sigma.
inline std::vector<IdentityRow> oracle_crosscheck(const MixtureParams& params,
                                                  const oracle::OracleConfig& cfg,
                                                  const expansion::SeriesOptions& sopt) {
  std::vector<IdentityRow> rows;
  const double volume = params.box.volume();
  const auto table = oracle::estimate_terms(params, cfg);
  const auto xi = oracle::log_xi_from_table(params, table);
  const auto obs = oracle::observables_from_table(params, table);

  expansion::SeriesOptions so = sopt;
  so.force = true;
  const auto press = expansion::pressure_series(params, so);
  const auto rho_big = expansion::rho_R(params, so);
  const auto rho_small = expansion::rho_r(params, so);

  IdentityRow r1;
  r1.name = "excess pressure: (log Xi - z_r |L|)/|L| vs sum b_m zhat^m";
  r1.lhs = (xi.log_xi.value - params.zr * volume) / volume;
  r1.lhs_stderr = xi.log_xi.stderr_ / volume;
  r1.rhs = press.total;
  r1.rhs_stderr = press.total_stderr;
  r1.judge();
  rows.push_back(r1);

  IdentityRow r2;
  r2.name = "rho_R: oracle <N_R>/|L| vs sum m b_m zhat^m";
  r2.lhs = obs.rho_R.value;
  r2.lhs_stderr = obs.rho_R.stderr_;
  r2.rhs = rho_big.total;
  r2.rhs_stderr = rho_big.total_stderr;
  r2.judge();
  rows.push_back(r2);

  IdentityRow r3;
  r3.name = "rho_r: oracle <N_r>/|L| vs z_r(1 - |B|rho_R + sum db_m zhat^m)";
  r3.lhs = obs.rho_r.value;
  r3.lhs_stderr = obs.rho_r.stderr_;
  r3.rhs = rho_small.total;
  r3.rhs_stderr = rho_small.total_stderr;
  r3.judge();
  rows.push_back(r3);

  IdentityRow r4;
  r4.name = "free volume: rho_r |L| vs z_r <V_free>";
  r4.lhs = obs.rho_r.value * volume;
  r4.lhs_stderr = obs.rho_r.stderr_ * volume;
  r4.rhs = params.zr * obs.v_free.value;
  r4.rhs_stderr = params.zr * obs.v_free.stderr_;
  r4.judge();
  rows.push_back(r4);
  return rows;
}

namespace detail {

inline MixtureParams desk_penetrable() {
  MixtureParams p;
  p.R = 1.0;
  p.r = 0.1;
  p.zr = 0.05;
  p.zR = 0.003;
  p.model = model::ModelKind::penetrable;
  p.box = {6.0, geometry::Boundary::periodic, 3};
  return p;
}

inline MixtureParams free_space_params(model::ModelKind kind, double zr) {
  MixtureParams p;
  p.R = 1.0;
  p.r = 0.1;
  p.zr = zr;
  p.zR = 0.0;
  p.model = kind;
  p.box = {24.0, geometry::Boundary::free_space, 3};
  return p;
}

inline Vec3 random_in_ball(mc::Rng& rng, const Vec3& center, double radius) {
  Vec3 p;
  while (true) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      p[c] = rng.uniform(-1.0, 1.0);
      s += p[c] * p[c];
    }
    if (s <= 1.0) break;
  }
  for (int c = 0; c < 3; ++c) p[c] = center[c] + radius * p[c];
  return p;
}

template <class F>
CriterionResult timed(int id, const std::string& name, F&& body) {
  CriterionResult res;
  res.id = id;
  res.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::ostringstream details;
    res.pass = body(details);
    res.details = details.str();
  } catch (const std::exception& e) {
    res.pass = false;
    res.details = std::string("exception: ") + e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Criterion 1: geometry exactness.

inline CriterionResult criterion_geometry(const ValidateOptions& opt) {
  return detail::timed(1, "geometry exactness (lens closed form, k-intersection vs grid)",
                       [&](std::ostringstream& out) {
    mc::Rng rng(mc::substream_seed(opt.seed, 1));
    double worst_rel = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double R = rng.uniform(0.5, 2.0);
      const double r = R * rng.uniform(0.02, 0.3);
      const double lens = geometry::lens_volume(R + r, 2.0 * R);
      const double vov = 2.0 * std::numbers::pi / 3.0 * r * r * (3.0 * R + 2.0 * r);
      worst_rel = std::max(worst_rel, std::abs(lens - vov) / vov);
    }
    bool lens_ok = worst_rel <= 1e-12;
    out << "lens vs V_ov worst rel err " << worst_rel;

    int grid_fail = 0;
    for (int i = 0; i < 10; ++i) {
      const double rho = 1.1;
      // triangle side lengths in the genuinely-overlapping range
      std::vector<geometry::BallSpec> balls;
      const double d12 = rng.uniform(1.0, 1.8), d13 = rng.uniform(1.0, 1.8);
      const double ang = rng.uniform(0.5, 1.5);
      balls.push_back({{0, 0, 0}, rho});
      balls.push_back({{d12, 0, 0}, rho});
      balls.push_back({{d13 * std::cos(ang), d13 * std::sin(ang), 0}, rho});
      geometry::KIntersectOptions ko;
      ko.samples = 1u << 20;
      ko.seed = rng.next_u64();
      ko.workers = opt.workers;
      const auto mc_est = geometry::k_intersection_volume(balls, ko);
      const double g1 = quadrature::grid_intersection_volume(balls, 0.005);
      const double g2 = quadrature::grid_intersection_volume(balls, 0.0025);
      const double grid_err = 2.0 * std::abs(g1 - g2);  // discretization proxy
      if (std::abs(mc_est.value - g2) > 3.0 * mc_est.stderr_ + grid_err) ++grid_fail;
    }
    out << "; grid-check failures " << grid_fail << "/10";
    return lens_ok && grid_fail == 0;
  });
}

// --------------------------------------------------------------------------
// Criterion 2: partition-scheme completeness.

inline CriterionResult criterion_partition(const ValidateOptions&) {
  return detail::timed(2, "partition scheme: sum 2^#E' = #C_n, unique intervals, Kruskal",
                       [&](std::ostringstream& out) {
    const std::uint64_t expected[] = {4, 38, 728};
    bool ok = true;
    for (int n = 3; n <= 5; ++n) {
      const auto rep = graphs::partition_check(n);
      ok = ok && rep.pass() && rep.interval_sum == expected[n - 3];
      out << "n=" << n << ": sum=" << rep.interval_sum
          << " count=" << rep.connected_count << (rep.pass() ? " ok; " : " FAIL; ");
    }
    return ok;
  });
}

// --------------------------------------------------------------------------
// Criterion 3: the three path-order implications, exhaustively.

inline CriterionResult criterion_crucialstar(const ValidateOptions&) {
  return detail::timed(3, "cloud/star path-order implications (exhaustive, m+r <= 6)",
                       [&](std::ostringstream& out) {
    std::uint64_t checked = 0, violations = 0;
    for (int n = 3; n <= 6; ++n) {
      const auto trees = graphs::enumerate_trees(n);
      for (int m = 2; m < n; ++m) {
        for (const auto& tau : trees) {
          std::vector<char> in_tree(n * n + n + 1, 0);
          for (auto [a, b] : tau.edges) in_tree[a * n + b] = in_tree[b * n + a] = 1;
          const auto eprime = graphs::e_prime_of(tau);
          auto in_eprime = [&](int a, int b) {
            const auto e = graphs::make_edge(a, b);
            for (const auto& q : eprime)
              if (q == e) return true;
            return false;
          };
          for (int k = m + 1; k <= n; ++k)
            for (int s = 1; s <= m; ++s)
              for (int t = s + 1; t <= m; ++t) {
                if (in_tree[s * n + t]) continue;
                const bool ks_tree = in_tree[k * n + s], kt_tree = in_tree[k * n + t];
                const bool ks_ep = in_eprime(k, s), kt_ep = in_eprime(k, t);
                const bool st_ep = in_eprime(s, t);
                ++checked;
                if (ks_tree && kt_tree && !st_ep) ++violations;          // (a)
                if (ks_tree && kt_ep && !st_ep) ++violations;            // (b)
                if (kt_tree && ks_ep && !st_ep) ++violations;            // (b) mirrored
                if (ks_ep && kt_ep && !st_ep) ++violations;              // (c)
              }
        }
      }
    }
    out << checked << " (tree, cloud, star-pair) cases, " << violations << " violations";
    return violations == 0;
  });
}

// --------------------------------------------------------------------------
// Criterion 4: tree-graph inequality on random penetrable configurations.

inline CriterionResult criterion_tree_graph(const ValidateOptions& opt) {
  return detail::timed(4, "tree-graph inequality |phi*^T| <= corona tree majorant",
                       [&](std::ostringstream& out) {
    const auto params = detail::free_space_params(model::ModelKind::penetrable, 0.05);
    mc::Rng rng(mc::substream_seed(opt.seed, 4));
    const Vec3 center{12, 12, 12};
    int violations = 0, active = 0;
    const std::pair<int, int> cases[] = {{2, 1}, {3, 1}, {2, 2}, {3, 2}};
    for (auto [m, r] : cases) {
      for (int it = 0; it < 1000; ++it) {
        model::Configuration config;
        for (int i = 0; i < m; ++i)
          config.large.push_back(detail::random_in_ball(rng, center, 2.0 * (params.R + params.r)));
        for (int k = 0; k < r; ++k)
          config.clouds.push_back({{detail::random_in_ball(rng, center, 2.5 * (params.R + params.r))}});
        const double lhs = std::abs(interactions::phi_star_T(config, params));
        const double rhs = interactions::tree_graph_majorant(config, params);
        if (lhs > 0.0) ++active;
        if (lhs > rhs + 1e-12) ++violations;
      }
    }
    out << "4000 configurations (" << active << " with phi*^T != 0), "
        << violations << " violations";
    return violations == 0 && active > 100;
  });
}

// --------------------------------------------------------------------------
// Criterion 5: the corona surrogate inequalities on both models and boxes.

inline CriterionResult criterion_zeta_tilde(const ValidateOptions& opt) {
  return detail::timed(5, "corona surrogate inequalities for zeta_tilde",
                       [&](std::ostringstream& out) {
    mc::Rng rng(mc::substream_seed(opt.seed, 5));
    int violations = 0, active = 0;
    for (int model_idx = 0; model_idx < 2; ++model_idx)
      for (int box_idx = 0; box_idx < 2; ++box_idx) {
        MixtureParams params = detail::free_space_params(
            model_idx == 0 ? model::ModelKind::penetrable : model::ModelKind::colloid,
            0.05);
        if (box_idx == 1) params.box = {6.0, geometry::Boundary::periodic, 3};
        const double L = params.box.side;
        const Vec3 center{L / 2, L / 2, L / 2};
        for (int it = 0; it < 1000; ++it) {
          const int k = 2 + static_cast<int>(rng.uniform_index(2));  // 2..3 stars
          std::vector<Vec3> xs;
          for (int i = 0; i < k; ++i)
            xs.push_back(params.wrap(detail::random_in_ball(rng, center, 2.2 * (params.R + params.r))));
          model::Cloud y;
          const int pts = model_idx == 0 ? 1 : 1 + static_cast<int>(rng.uniform_index(3));
          y.points.push_back(params.wrap(detail::random_in_ball(rng, center, 2.5 * (params.R + params.r))));
          for (int j = 1; j < pts; ++j)  // grown within 2r: overlap-connected
            y.points.push_back(params.wrap(detail::random_in_ball(
                rng, y.points[rng.uniform_index(y.points.size())], 2.0 * params.r)));
          if (!model::cloud_overlap_connected(y, params)) continue;

          double hard = 1.0;
          for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
              hard *= 1.0 + model::mayer_f(xs[i], model::SpeciesKind::large, xs[j],
                                           model::SpeciesKind::large, params);
          double prod_zeta = 1.0, prod_tilde = 1.0;
          for (int i = 0; i < k; ++i) {
            prod_zeta *= std::abs(model::zeta(xs[i], y, params));
            prod_tilde *= std::abs(model::zeta_tilde(xs[i], y, params));
          }
          const double lhs1 = hard * prod_zeta;
          const double rhs1 = hard * prod_tilde;
          if (lhs1 > 0.0) ++active;
          if (lhs1 > rhs1 + 1e-12) ++violations;

          double tail = 1.0;
          for (int j = 1; j < k; ++j) tail *= 1.0 + model::zeta(xs[j], y, params);
          const double lhs2 = std::abs(model::zeta(xs[0], y, params)) * hard *
                              std::abs(tail - 1.0);
          const double rhs2 = std::abs(model::zeta_tilde(xs[0], y, params)) * hard;
          if (lhs2 > rhs2 + 1e-12) ++violations;
        }
      }
    out << "active cases " << active << ", violations " << violations;
    return violations == 0 && active > 200;
  });
}

// --------------------------------------------------------------------------
// Criterion 6: psi^T hypergraph mode vs cloud-series mode.

inline CriterionResult criterion_psit_modes(const ValidateOptions& opt) {
  return detail::timed(6, "psi^T: hypergraph mode vs cloud-series mode (m = 2, 3)",
                       [&](std::ostringstream& out) {
    auto params = detail::free_space_params(model::ModelKind::penetrable, 0.05);
    const Vec3 c{12, 12, 12};
    bool ok = true;
    struct Case {
      std::vector<Vec3> xs;
    };
    const double R = params.R, r = params.r;
    std::vector<Case> cases;
    cases.push_back({{c, {c[0] + 2.0 * R, c[1], c[2]}}});                       // pair at contact
    cases.push_back({{c, {c[0] + 2.0 * R + r, c[1], c[2]}}});                   // pair in the well
    cases.push_back({{c,
                      {c[0] + 2.0 * R, c[1], c[2]},
                      {c[0] + R, c[1] + 2.0 * R * 0.9, c[2]}}});                // triangle
    cases.push_back({{c,
                      {c[0] + 1.2 * R, c[1], c[2]},
                      {c[0] + 0.6 * R, c[1] + 1.1 * R, c[2]}}});                // overlapping cores
    int idx = 0;
    for (const auto& cs : cases) {
      ++idx;
      mc::Rng seeder(mc::substream_seed(opt.seed, 600 + idx));
      // exact-W hypergraph evaluation
      std::vector<Vec3> xs = cs.xs;
      interactions::WProvider w = [&](std::span<const int> J) {
        std::vector<Vec3> pts;
        for (int i : J) pts.push_back(xs[i]);
        return effective::w_J_penetrable(pts, params, 1u << 20, seeder.next_u64(),
                                         opt.workers)
            .value;
      };
      const double hyper = interactions::psi_T_hypergraph(xs, params, w);
      interactions::CloudSeriesOptions copt;
      copt.r_max = 4;
      copt.samples = static_cast<std::uint64_t>((1u << 17) * opt.samples_scale);
      copt.seed = mc::substream_seed(opt.seed, 660 + idx);
      copt.workers = opt.workers;
      const auto cloud = interactions::psi_T_cloud_series(xs, params, copt);
      const double band = 3.0 * cloud.estimate.stderr_ + 1e-6;
      const bool pass = std::abs(hyper - cloud.estimate.value) <= band;
      out << "case " << idx << ": hyper=" << hyper << " cloud=" << cloud.estimate.value
          << " +- " << cloud.estimate.stderr_ << (pass ? " ok; " : " FAIL; ");
      ok = ok && pass;
    }
    return ok;
  });
}

// --------------------------------------------------------------------------
// Criterion 7: b_2 against the radial quadrature.

inline CriterionResult criterion_b2_oracle(const ValidateOptions& opt) {
  return detail::timed(7, "b_2 Monte Carlo vs radial quadrature; b_2(0) closed form",
                       [&](std::ostringstream& out) {
    MixtureParams p0 = detail::free_space_params(model::ModelKind::penetrable, 0.0);
    const double b2_zero = quadrature::b2_penetrable(p0);
    const double exact = -16.0 * std::numbers::pi / 3.0;
    const bool exact_ok = std::abs(b2_zero - exact) <= 1e-9 * std::abs(exact);
    out << "b2(0) quadrature " << b2_zero << " vs -16pi/3 rel err "
        << std::abs(b2_zero - exact) / std::abs(exact);

    mc::Rng rng(mc::substream_seed(opt.seed, 7));
    int fails = 0;
    for (int i = 0; i < 10; ++i) {
      MixtureParams p = p0;
      p.R = rng.uniform(0.6, 1.5);
      p.r = p.R * rng.uniform(0.05, 0.25);
      p.zr = rng.uniform(0.0, 0.2);
      const double quad = quadrature::b2_penetrable(p);
      expansion::BmOptions bo;
      bo.samples = static_cast<std::uint64_t>((1u << 18) * opt.samples_scale);
      bo.seed = rng.next_u64();
      bo.workers = opt.workers;
      const auto mc_b2 = expansion::b_m(2, p, bo);
      if (std::abs(mc_b2.estimate - quad) > 3.0 * mc_b2.stderr_) ++fails;
    }
    out << "; MC-vs-quadrature failures " << fails << "/10";
    return exact_ok && fails == 0;
  });
}

// --------------------------------------------------------------------------
// Criterion 8: expansion vs brute force on the desk case.

inline CriterionResult criterion_oracle_crosscheck(const ValidateOptions& opt) {
  return detail::timed(8, "desk case: expansion vs grand-canonical oracle (3 sigma)",
                       [&](std::ostringstream& out) {
    const auto params = detail::desk_penetrable();
    oracle::OracleConfig cfg;
    cfg.samples_per_term = static_cast<std::uint64_t>(200000 * opt.samples_scale);
    cfg.seed = mc::substream_seed(opt.seed, 8);
    cfg.workers = opt.workers;
    expansion::SeriesOptions so;
    so.M = 3;
    so.bm.samples = static_cast<std::uint64_t>((1u << 19) * opt.samples_scale);
    so.bm.seed = mc::substream_seed(opt.seed, 88);
    so.bm.workers = opt.workers;
    const auto rows = oracle_crosscheck(params, cfg, so);
    bool ok = true;
    for (const auto& r : rows) {
      out << r.name << ": lhs=" << r.lhs << " rhs=" << r.rhs << " ("
          << r.sigmas << " sigma)" << (r.pass ? " ok; " : " FAIL; ");
      ok = ok && r.pass;
    }
    return ok;
  });
}

// --------------------------------------------------------------------------
// Criterion 9: closed-form criteria constants and the sweep monotonicity.

inline CriterionResult criterion_region_improvement(const ValidateOptions&) {
  return detail::timed(9, "admissible-region closed forms and improvement ratio",
                       [&](std::ostringstream& out) {
    MixtureParams p = detail::free_space_params(model::ModelKind::penetrable, 0.1);
    // Recomputed from the closed forms at 30-digit precision.
    const double zhat_easy_ref = 0.0083647711731658971;
    const double zR_easy_ref = 0.0146078193176726247;
    const double zR_kp_ref = 0.0062863071689262411;
    const double ratio_ref = 2.3237520733762958;
    const auto easy = convergence::max_zhat_easy(p);
    const double kp = convergence::max_zR_kp(p);
    const double ratio = easy.zR_bound / kp;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    bool ok = rel(easy.zhat_bound, zhat_easy_ref) <= 1e-6 &&
              rel(easy.zR_bound, zR_easy_ref) <= 1e-6 &&
              rel(kp, zR_kp_ref) <= 1e-6 && rel(ratio, ratio_ref) <= 1e-6;
    out << "zhat_easy=" << easy.zhat_bound << " zR_easy=" << easy.zR_bound
        << " zR_kp=" << kp << " ratio=" << ratio;

    std::vector<double> grid(41);
    for (int i = 0; i < 41; ++i) grid[i] = 0.2 * i / 40.0;
    const auto rows = convergence::region_sweep(p, grid);
    double prev = 0.0;
    bool monotone = true;
    for (const auto& row : rows) {
      if (row.ratio < 1.0 - 1e-12 || row.ratio < prev - 1e-12) monotone = false;
      prev = row.ratio;
      const double closed = convergence::improvement_ratio_closed_form(
          [&] { MixtureParams q = p; q.zr = row.zr; return q; }());
      if (std::abs(row.ratio - closed) > 1e-10 * closed) monotone = false;
    }
    out << "; sweep ratio >= 1, nondecreasing, matches closed form: "
        << (monotone ? "yes" : "NO");
    return ok && monotone;
  });
}

// --------------------------------------------------------------------------
// Criterion 10: KP necessity as a property test.

inline CriterionResult criterion_kp_necessity(const ValidateOptions& opt) {
  return detail::timed(10, "KP-witness property: every (a, A) witness obeys the bound",
                       [&](std::ostringstream& out) {
    mc::Rng rng(mc::substream_seed(opt.seed, 10));
    int fails = 0;
    for (int i = 0; i < 100; ++i) {
      MixtureParams p = detail::free_space_params(model::ModelKind::penetrable,
                                                  rng.uniform(0.0, 0.3));
      const double a = rng.uniform(0.01, 3.0), A = rng.uniform(0.01, 3.0);
      const double zR = convergence::max_zR_kp_witness(p, a, A);
      if (zR > convergence::max_zR_kp(p) + 1e-12) ++fails;
    }
    out << "100 random witnesses, " << fails << " bound violations";
    return fails == 0;
  });
}

// --------------------------------------------------------------------------
// Criterion 11: colloid witness pipeline.

inline CriterionResult criterion_witness_pipeline(const ValidateOptions& opt) {
  return detail::timed(11, "colloid witness search finds and re-verifies constants",
                       [&](std::ostringstream& out) {
    mc::Rng rng(mc::substream_seed(opt.seed, 11));
    int found = 0, reverified = 0, precondition_reports = 0;
    const double v2r_cap = 1.0 / (std::numbers::e * geometry::ball_volume(0.2));
    for (int i = 0; i < 10; ++i) {
      MixtureParams p = detail::free_space_params(model::ModelKind::colloid,
                                                  rng.uniform(0.0, 0.9) * v2r_cap);
      // probe the admissible bound first, then test at half of it
      const auto probe = convergence::witness_search_hs(p, 0.0);
      const double zhat = 0.5 * probe.admissible_zhat;
      const auto w = convergence::witness_search_hs(p, zhat);
      if (w.satisfied) {
        ++found;
        const auto recheck = convergence::check_hs(p, zhat, w.constants.at("a"),
                                                   w.constants.at("b"),
                                                   w.constants.at("c"), true);
        if (recheck.satisfied) ++reverified;
      }
    }
    for (int i = 0; i < 10; ++i) {
      MixtureParams p = detail::free_space_params(model::ModelKind::colloid,
                                                  (1.01 + rng.uniform(0.0, 2.0)) * v2r_cap);
      const auto w = convergence::witness_search_hs(p, 1e-6);
      if (w.precondition_failed) ++precondition_reports;
    }
    out << "found " << found << "/10, re-verified " << reverified
        << "/10, precondition failures reported " << precondition_reports << "/10";
    return found == 10 && reverified == 10 && precondition_reports == 10;
  });
}

// --------------------------------------------------------------------------
// Criterion 12: rooted-hypergraph derivative vs finite differences.

inline CriterionResult criterion_derivative(const ValidateOptions& opt) {
  return detail::timed(12, "db_2/dz_r: rooted hypergraphs vs central finite differences",
                       [&](std::ostringstream& out) {
    mc::Rng rng(mc::substream_seed(opt.seed, 12));
    const double h = 1e-3;
    int fails = 0;
    for (int i = 0; i < 5; ++i) {
      MixtureParams p = detail::free_space_params(model::ModelKind::penetrable,
                                                  rng.uniform(0.01, 0.2));
      p.R = rng.uniform(0.7, 1.3);
      p.r = p.R * rng.uniform(0.05, 0.2);
      expansion::BmOptions bo;
      bo.samples = static_cast<std::uint64_t>((1u << 18) * opt.samples_scale);
      bo.seed = rng.next_u64();
      bo.workers = opt.workers;
      const auto rooted = expansion::db_m_dzr(2, p, bo);
      MixtureParams plus = p, minus = p;
      plus.zr += h;
      minus.zr -= h;
      const double fd = (quadrature::b2_penetrable(plus) - quadrature::b2_penetrable(minus)) / (2.0 * h);
      // central-difference truncation is O(h^2); the band carries it explicitly
      const double band = 3.0 * rooted.stderr_ + 1e-4;
      if (std::abs(rooted.estimate - fd) > band) ++fails;
    }
    out << "5 parameter tuples, " << fails << " disagreements";
    return fails == 0;
  });
}

inline ValidationReport run_acceptance(const ValidateOptions& opt = {},
                                       bool print_lines = false) {
  using Runner = CriterionResult (*)(const ValidateOptions&);
  const Runner runners[] = {
      criterion_geometry,       criterion_partition,
      criterion_crucialstar,    criterion_tree_graph,
      criterion_zeta_tilde,     criterion_psit_modes,
      criterion_b2_oracle,      criterion_oracle_crosscheck,
      criterion_region_improvement, criterion_kp_necessity,
      criterion_witness_pipeline,   criterion_derivative,
  };
  ValidationReport report;
  for (const Runner run : runners) {
    const CriterionResult r = run(opt);
    if (print_lines) {
      std::printf("[%s] criterion %2d (%.1fs): %s -- %s\n", r.pass ? "PASS" : "FAIL",
                  r.id, r.seconds, r.name.c_str(), r.details.c_str());
      std::fflush(stdout);
    }
    report.results.push_back(r);
  }
  return report;
}

}  // namespace renact::validate
