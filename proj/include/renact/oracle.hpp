#pragma once

// Brute-force grand-canonical reference values in a small periodic box:
// term-by-term Monte Carlo of the partition function, particle densities,
// free volume, and the pinned-sphere ratio identity. Ground truth for the
// desk-scale validation of the expansion; deliberately no cleverness beyond
// direct sampling of the truncated two-species ensemble.

#include <cmath>
#include <future>
#include <span>
#include <stdexcept>
#include <vector>

#include "renact/effective.hpp"
#include "renact/geometry.hpp"
#include "renact/mc.hpp"
#include "renact/model.hpp"

namespace renact::oracle {

using model::MixtureParams;
using model::Vec3;

struct OracleConfig {
  int n1_max = 6;
  int n2_max = 40;
  std::uint64_t samples_per_term = 200000;
  std::uint64_t seed = 42;
  int workers = 1;
  double tail_tolerance = 1e-3;
};

/// Activity-independent geometry of one (n1, n2) term: acceptance probability
/// of the product of hard-core indicators, plus the joint acceptance with a
/// uniform probe point lying in the solvent-free volume.
struct TermStats {
  double p = 0.0;        // E[valid]
  double q = 0.0;        // E[valid * probe-free]
  double var_p = 0.0;    // variance of the p estimate
  double var_q = 0.0;
  double cov_pq = 0.0;
  std::uint64_t n = 0;
};

struct TermTable {
  int n1_max = 0;
  int n2_max = 0;
  std::uint64_t seed = 0;
  std::vector<TermStats> stats;  // (n1_max+1) * (n2_max+1), row-major in n1

  const TermStats& at(int n1, int n2) const {
    return stats[static_cast<std::size_t>(n1) * (n2_max + 1) + n2];
  }
};

namespace detail {

inline TermStats estimate_term(const MixtureParams& params, int n1, int n2,
                               std::uint64_t samples, std::uint64_t seed) {
  TermStats t;
  t.n = samples;
  if (n1 == 0 && n2 == 0) {
    t.p = 1.0;
    t.q = 1.0;
    return t;
  }
  // Ideal solvent with no large spheres: every configuration is valid and the
  // probe is always free. Exact, no sampling.
  if (n1 == 0 && params.ideal_solvent()) {
    t.p = 1.0;
    t.q = 1.0;
    return t;
  }

  mc::Rng rng(seed);
  const double L = params.box.side;
  const double ll = 2.0 * params.R, ls = params.R + params.r, ss = 2.0 * params.r;
  const bool hard_solvent = !params.ideal_solvent();
  std::vector<Vec3> big(n1), small(n2);
  std::uint64_t hits = 0, joint = 0;
  for (std::uint64_t it = 0; it < samples; ++it) {
    for (auto& x : big)
      for (int c = 0; c < 3; ++c) x[c] = rng.uniform(0.0, L);
    for (auto& y : small)
      for (int c = 0; c < 3; ++c) y[c] = rng.uniform(0.0, L);
    Vec3 probe;
    for (int c = 0; c < 3; ++c) probe[c] = rng.uniform(0.0, L);

    bool valid = true;
    for (int i = 0; i < n1 && valid; ++i)
      for (int j = i + 1; j < n1 && valid; ++j)
        valid = params.distance(big[i], big[j]) >= ll;
    for (int i = 0; i < n1 && valid; ++i)
      for (int j = 0; j < n2 && valid; ++j)
        valid = params.distance(big[i], small[j]) >= ls;
    if (hard_solvent)
      for (int i = 0; i < n2 && valid; ++i)
        for (int j = i + 1; j < n2 && valid; ++j)
          valid = params.distance(small[i], small[j]) >= ss;
    if (!valid) continue;
    ++hits;
    bool free_probe = true;
    for (int i = 0; i < n1 && free_probe; ++i)
      free_probe = params.distance(probe, big[i]) >= ls;
    if (free_probe) ++joint;
  }
  const double n = static_cast<double>(samples);
  t.p = hits / n;
  t.q = joint / n;
  t.var_p = t.p * (1.0 - t.p) / n;
  t.var_q = t.q * (1.0 - t.q) / n;
  t.cov_pq = (t.q - t.p * t.q) / n;  // E[valid * joint] = q
  return t;
}

}  // namespace detail

/// Estimate the full (n1, n2) table once; all activity evaluations reuse it,
/// which is the shared-random-numbers variance reduction across activity
/// grids (the table is activity-independent).
inline TermTable estimate_terms(const MixtureParams& params, const OracleConfig& cfg) {
  params.validate();
  if (cfg.n1_max < 0 || cfg.n2_max < 0)
    throw std::invalid_argument("estimate_terms: negative truncation");
  TermTable table;
  table.n1_max = cfg.n1_max;
  table.n2_max = cfg.n2_max;
  table.seed = cfg.seed;
  table.stats.resize(static_cast<std::size_t>(cfg.n1_max + 1) * (cfg.n2_max + 1));

  std::vector<std::pair<int, int>> jobs;
  for (int n1 = 0; n1 <= cfg.n1_max; ++n1)
    for (int n2 = 0; n2 <= cfg.n2_max; ++n2) jobs.emplace_back(n1, n2);

  auto run = [&](std::size_t j) {
    const auto [n1, n2] = jobs[j];
    table.stats[static_cast<std::size_t>(n1) * (cfg.n2_max + 1) + n2] =
        detail::estimate_term(params, n1, n2, cfg.samples_per_term,
                              mc::substream_seed(cfg.seed, j));
  };
  if (cfg.workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (int w = 0; w < cfg.workers; ++w)
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1))
          run(j);
      }));
    for (auto& f : pool) f.get();
  }
  return table;
}

namespace detail {

inline double log_weight(const MixtureParams& params, int n1, int n2) {
  const double v = params.box.volume();
  if ((n1 > 0 && params.zR == 0.0) || (n2 > 0 && params.zr == 0.0))
    return -std::numeric_limits<double>::infinity();
  double lw = 0.0;
  if (n1 > 0) lw += n1 * std::log(params.zR * v);
  if (n2 > 0) lw += n2 * std::log(params.zr * v);
  for (int i = 2; i <= n1; ++i) lw -= std::log(static_cast<double>(i));
  for (int i = 2; i <= n2; ++i) lw -= std::log(static_cast<double>(i));
  return lw;
}

}  // namespace detail

struct XiEvaluation {
  mc::MCEstimate log_xi;
  double xi = 0.0;
  bool truncation_tail_warning = false;
};

/// log Xi from the term table. Exact fast path for the ideal solvent alone
/// (log Xi = z_r |Lambda| with no truncation error).
inline XiEvaluation log_xi_from_table(const MixtureParams& params,
                                      const TermTable& table) {
  params.validate();
  if (params.zR < 0.0 || params.zr < 0.0)
    throw std::invalid_argument("log_xi_from_table: activities must be >= 0");
  XiEvaluation out;
  if (params.zR == 0.0 && params.ideal_solvent()) {
    out.log_xi = mc::MCEstimate::exact(params.zr * params.box.volume(), table.seed);
    out.xi = std::exp(out.log_xi.value);
    return out;
  }

  double xi = 0.0, var = 0.0, boundary = 0.0;
  for (int n1 = 0; n1 <= table.n1_max; ++n1)
    for (int n2 = 0; n2 <= table.n2_max; ++n2) {
      const double lw = detail::log_weight(params, n1, n2);
      if (!std::isfinite(lw)) continue;
      const auto& t = table.at(n1, n2);
      const double w = std::exp(lw);
      xi += w * t.p;
      var += w * w * t.var_p;
      if ((n1 == table.n1_max && params.zR > 0.0) ||
          (n2 == table.n2_max && params.zr > 0.0))
        boundary += std::abs(w * t.p);
    }
  out.xi = xi;
  out.log_xi = {std::log(xi), std::sqrt(var) / xi, table.stats.front().n, table.seed};
  out.truncation_tail_warning = boundary > 1e-3 * std::abs(xi);
  return out;
}

struct OracleObservables {
  mc::MCEstimate rho_R;    // <N_R> / |Lambda|
  mc::MCEstimate rho_r;    // <N_r> / |Lambda|
  mc::MCEstimate v_free;   // <|Lambda \ U B(x_i, R+r)|>
  bool truncation_tail_warning = false;
};

/// Grand-canonical expectations from the table, with delta-method errors that
/// account for the correlation between numerator and denominator.
inline OracleObservables observables_from_table(const MixtureParams& params,
                                                const TermTable& table) {
  params.validate();
  const double volume = params.box.volume();

  double B = 0.0;  // Xi
  std::vector<double> w_all, p_all;
  std::vector<int> n1_all, n2_all;
  std::vector<const TermStats*> t_all;
  for (int n1 = 0; n1 <= table.n1_max; ++n1)
    for (int n2 = 0; n2 <= table.n2_max; ++n2) {
      const double lw = detail::log_weight(params, n1, n2);
      if (!std::isfinite(lw)) continue;
      const auto& t = table.at(n1, n2);
      const double w = std::exp(lw);
      B += w * t.p;
      w_all.push_back(w);
      n1_all.push_back(n1);
      n2_all.push_back(n2);
      t_all.push_back(&t);
    }

  auto ratio_moment = [&](auto&& numerator_of, bool use_q) {
    double A = 0.0;
    for (std::size_t i = 0; i < w_all.size(); ++i)
      A += w_all[i] * (use_q ? t_all[i]->q : t_all[i]->p) * numerator_of(i);
    const double f = A / B;
    double var = 0.0;
    for (std::size_t i = 0; i < w_all.size(); ++i) {
      const double c = numerator_of(i);
      const double gA = w_all[i] * c / B;        // d f / d q_i (or p_i in A)
      const double gB = -f * w_all[i] / B;       // d f / d p_i through Xi
      if (use_q) {
        var += gA * gA * t_all[i]->var_q + gB * gB * t_all[i]->var_p +
               2.0 * gA * gB * t_all[i]->cov_pq;
      } else {
        const double g = gA + gB;  // same p_i appears in both sums
        var += g * g * t_all[i]->var_p;
      }
    }
    return mc::MCEstimate{f, std::sqrt(std::max(var, 0.0)),
                          table.stats.front().n, table.seed};
  };

  OracleObservables out;
  out.rho_R = ratio_moment([&](std::size_t i) { return static_cast<double>(n1_all[i]); },
                           false)
                  .scaled(1.0 / volume);
  out.rho_r = ratio_moment([&](std::size_t i) { return static_cast<double>(n2_all[i]); },
                           false)
                  .scaled(1.0 / volume);
  out.v_free = ratio_moment([](std::size_t) { return 1.0; }, true).scaled(volume);
  out.truncation_tail_warning = log_xi_from_table(params, table).truncation_tail_warning;
  return out;
}

// ---------------------------------------------------------------------------
// Pinned-sphere ratio identity.

struct MixedRatio {
  mc::MCEstimate direct;    // Z^x_s / Z_s by direct solvent sampling
  double effective = 0.0;   // exp(sum int zeta dnu - sum W) closed form
};

/// Z^x_{Xs} / Z_{Xs} for m <= 2 pinned large spheres in the penetrable model,
/// computed (i) by direct truncated-ensemble sampling of the solvent and
/// (ii) through the effective one- and two-body closed forms.
inline MixedRatio mixed_ratio_check(const MixtureParams& params,
                                    const OracleConfig& cfg,
                                    std::span<const Vec3> pinned) {
  params.validate();
  if (!params.ideal_solvent())
    throw std::invalid_argument("mixed_ratio_check: penetrable model required");
  if (pinned.size() > 2)
    throw std::invalid_argument("mixed_ratio_check: m <= 2 only");

  MixedRatio out;
  const double volume = params.box.volume();
  const double reach = params.R + params.r;

  // effective side: exp(-z_r sum |B_i| + z_r |B_1 cap B_2|) in a periodic box
  double exponent = 0.0;
  for (std::size_t i = 0; i < pinned.size(); ++i) exponent -= params.zr * geometry::ball_volume(reach);
  if (pinned.size() == 2) {
    const double lens =
        geometry::lens_volume(reach, params.distance(pinned[0], pinned[1]));
    exponent += params.zr * lens;  // -W_2
  }
  out.effective = std::exp(exponent);

  if (pinned.empty()) {
    out.direct = mc::MCEstimate::exact(1.0, cfg.seed);
    return out;
  }

  // direct side: Z^x_s = sum_n2 (z_r V)^{n2}/n2! * P(all solvent outside the
  // pinned exclusion balls); Z_s = e^{z_r V} exactly for the ideal solvent.
  double num = 0.0, var = 0.0;
  for (int n2 = 0; n2 <= cfg.n2_max; ++n2) {
    double lw = n2 > 0 && params.zr == 0.0 ? -std::numeric_limits<double>::infinity()
                                           : n2 * std::log(std::max(params.zr, 0.0) * volume);
    for (int i = 2; i <= n2; ++i) lw -= std::log(static_cast<double>(i));
    if (!std::isfinite(lw)) {
      if (n2 == 0) num += 1.0;
      continue;
    }
    const double w = std::exp(lw);
    if (n2 == 0) {
      num += w;
      continue;
    }
    auto p = mc::sample_mean(
        cfg.samples_per_term,
        mc::substream_seed(cfg.seed, 0x77c0ffee + static_cast<std::uint64_t>(n2)),
        cfg.workers, [&](mc::Rng& rng) {
          for (int j = 0; j < n2; ++j) {
            Vec3 y;
            for (int c = 0; c < 3; ++c) y[c] = rng.uniform(0.0, params.box.side);
            for (const Vec3& x : pinned)
              if (params.distance(y, x) < reach) return 0.0;
          }
          return 1.0;
        });
    num += w * p.value;
    var += w * w * p.stderr_ * p.stderr_;
  }
  const double zs = std::exp(params.zr * volume);
  out.direct = {num / zs, std::sqrt(var) / zs, cfg.samples_per_term, cfg.seed};
  return out;
}

// ---------------------------------------------------------------------------
// Free volume both ways.

/// V_free by uniform probe hit-testing (periodic box).
inline mc::MCEstimate v_free_hit_test(std::span<const Vec3> pinned,
                                      const MixtureParams& params,
                                      std::uint64_t samples, std::uint64_t seed) {
  params.validate();
  const double reach = params.R + params.r;
  auto est = mc::sample_mean(samples, seed, 1, [&](mc::Rng& rng) {
    Vec3 probe;
    for (int c = 0; c < 3; ++c) probe[c] = rng.uniform(0.0, params.box.side);
    for (const Vec3& x : pinned)
      if (params.distance(probe, x) < reach) return 0.0;
    return 1.0;
  });
  return est.scaled(params.box.volume());
}

/// V_free by inclusion-exclusion over the pinned exclusion balls: exact
/// single and pair terms, Monte Carlo for the higher intersections.
inline mc::MCEstimate v_free_inclusion_exclusion(std::span<const Vec3> pinned,
                                                 const MixtureParams& params,
                                                 std::uint64_t inner_samples,
                                                 std::uint64_t seed) {
  params.validate();
  if (!params.periodic())
    throw std::invalid_argument("v_free_inclusion_exclusion: periodic box only");
  const int m = static_cast<int>(pinned.size());
  const double reach = params.R + params.r;
  mc::MCEstimate total = mc::MCEstimate::exact(params.box.volume(), seed);
  std::uint64_t stream = 0;
  for (std::uint32_t s = 1; s < (1u << m); ++s) {
    const int k = std::popcount(s);
    const double sign = (k % 2 == 1) ? -1.0 : 1.0;  // - singles, + pairs, ...
    std::vector<geometry::BallSpec> balls;
    for (std::uint32_t b = s; b; b &= b - 1) {
      const Vec3& x = pinned[std::countr_zero(b)];
      balls.push_back({{x[0], x[1], x[2]}, reach});
    }
    geometry::KIntersectOptions opt;
    opt.samples = inner_samples;
    opt.seed = mc::substream_seed(seed, ++stream);
    opt.periodic_L = params.box.side;
    const auto v = geometry::k_intersection_volume(balls, opt);
    total = total + v.scaled(sign);
  }
  total.seed = seed;
  return total;
}

}  // namespace renact::oracle
