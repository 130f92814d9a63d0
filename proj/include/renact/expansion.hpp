#pragma once

// Cluster coefficients b_m(z_r), pressure and density series in the
// effective activity, and the z_r derivative of b_m via hyperedge-rooted
// hypergraphs. Coefficients are infinite-volume objects: all integrals run
// over free space regardless of the box the caller uses elsewhere.

#include <atomic>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "renact/convergence.hpp"
#include "renact/effective.hpp"
#include "renact/geometry.hpp"
#include "renact/interactions.hpp"
#include "renact/mc.hpp"
#include "renact/model.hpp"

namespace renact::expansion {

using model::MixtureParams;
using model::Vec3;

inline constexpr int kOrderBound = 4;  // M_max

struct ClusterCoefficient {
  int m = 1;
  double estimate = 1.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool truncation_tail_warning = false;
};

struct BmOptions {
  std::uint64_t samples = 1u << 18;
  std::uint64_t seed = 0;
  int workers = 1;
  std::uint64_t w_inner_samples = 2048;  // k >= 3 intersection volumes
  // Colloid psi^T evaluation nests inside the position integral, so the
  // per-evaluation budget stays small.
  interactions::CloudSeriesOptions cloud{.r_max = 2, .k_max = 2, .samples = 512};
};

namespace detail {

/// Free-space working params: positions live around the center of a box
/// large enough that no importance region or cloud reach is ever clipped.
struct FreeSpace {
  MixtureParams params;
  Vec3 origin;
  double sample_radius;  // positions drawn uniformly in this ball
};

inline FreeSpace free_space_for(const MixtureParams& base, int m) {
  FreeSpace fs;
  fs.params = base;
  fs.params.box.boundary = geometry::Boundary::free_space;
  fs.sample_radius = m * 2.0 * (base.R + base.r);
  const double margin = 4.0 * (base.R + base.r) + 1.0;
  fs.params.box.side = 2.0 * (fs.sample_radius + margin);
  const double c = fs.params.box.side / 2.0;
  fs.origin = {c, c, c};
  return fs;
}

inline Vec3 sample_offset_in_ball(mc::Rng& rng, const Vec3& center, double radius) {
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

/// Pairwise-intersection volumes |cap_{j in J} B(x_j, R+r)| for every subset
/// J (bitmask-indexed): exact for pairs, Monte Carlo above, zero whenever two
/// members are already disjoint.
inline std::vector<double> subset_volumes(std::span<const Vec3> xs,
                                          const MixtureParams& params,
                                          std::uint64_t inner_samples,
                                          mc::Rng& seeder) {
  const int m = static_cast<int>(xs.size());
  const double reach = params.R + params.r;
  std::vector<double> vol(1u << m, 0.0);
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    const int k = std::popcount(s);
    if (k < 2) continue;
    std::vector<int> idx;
    for (std::uint32_t b = s; b; b &= b - 1) idx.push_back(std::countr_zero(b));
    if (k == 2) {
      vol[s] = geometry::lens_volume(reach, params.distance(xs[idx[0]], xs[idx[1]]));
      continue;
    }
    // disjoint pair => empty intersection, skip the sampler
    bool disjoint = false;
    for (std::size_t i = 0; i < idx.size() && !disjoint; ++i)
      for (std::size_t j = i + 1; j < idx.size() && !disjoint; ++j)
        if (params.distance(xs[idx[i]], xs[idx[j]]) >= 2.0 * reach) disjoint = true;
    if (disjoint) continue;
    std::vector<geometry::BallSpec> balls;
    for (int i : idx)
      balls.push_back({{xs[i][0], xs[i][1], xs[i][2]}, reach});
    geometry::KIntersectOptions opt;
    opt.samples = inner_samples;
    opt.seed = seeder.next_u64();
    vol[s] = geometry::k_intersection_volume(balls, opt).value;
  }
  return vol;
}

inline bool reach_connected(std::span<const Vec3> xs, const MixtureParams& params) {
  const int m = static_cast<int>(xs.size());
  const double reach = 2.0 * (params.R + params.r);
  std::uint32_t seen = 1u, frontier = 1u;
  while (frontier) {
    std::uint32_t next = 0;
    for (std::uint32_t f = frontier; f; f &= f - 1) {
      const int v = std::countr_zero(f);
      for (int w = 0; w < m; ++w)
        if (!(seen & (1u << w)) && params.distance(xs[v], xs[w]) < reach)
          next |= 1u << w;
    }
    seen |= next;
    frontier = next;
  }
  return seen == (1u << m) - 1u;
}

/// psi^T evaluated with the exact penetrable W table derived from subset
/// volumes: W_J = z_r (-1)^{#J-1} |cap B|.
inline double psi_T_penetrable(std::span<const Vec3> xs, const MixtureParams& params,
                               const std::vector<double>& vol) {
  const int m = static_cast<int>(xs.size());
  interactions::WProvider w = [&](std::span<const int> J) {
    std::uint32_t s = 0;
    for (int i : J) s |= 1u << i;
    const double sign = (J.size() % 2 == 0) ? -1.0 : 1.0;
    return sign * params.zr * vol[s];
  };
  if (m == 1) return 1.0;
  return interactions::psi_T_hypergraph(xs, params, w);
}

}  // namespace detail

/// b_m(z_r) = (1/m!) int psi^T(0, x_2..x_m) dx_2..dx_m, Monte Carlo with
/// positions drawn uniformly in a ball of radius m * 2(R+r) around the root
/// (psi^T vanishes outside by finite interaction range). b_1 = 1 exactly.
inline ClusterCoefficient b_m(int m, const MixtureParams& base, const BmOptions& opt) {
  base.validate();
  if (m < 1 || m > kOrderBound)
    throw std::invalid_argument("b_m: order out of range");
  if (m == 1) return {1, 1.0, 0.0, 0, opt.seed, false};

  const auto fs = detail::free_space_for(base, m);
  const MixtureParams& params = fs.params;
  const double ball = geometry::ball_volume(fs.sample_radius);
  double m_factorial = 1.0;
  for (int i = 2; i <= m; ++i) m_factorial *= i;

  const bool penetrable = params.ideal_solvent();
  std::atomic<bool> tail_warning{false};

  auto est = mc::sample_mean(opt.samples, opt.seed, opt.workers, [&](mc::Rng& rng) {
    std::vector<Vec3> xs(m);
    xs[0] = fs.origin;
    for (int i = 1; i < m; ++i)
      xs[i] = detail::sample_offset_in_ball(rng, fs.origin, fs.sample_radius);
    if (!detail::reach_connected(xs, params)) return 0.0;
    if (penetrable) {
      const auto vol = detail::subset_volumes(xs, params, opt.w_inner_samples, rng);
      return detail::psi_T_penetrable(xs, params, vol);
    }
    interactions::CloudSeriesOptions copt = opt.cloud;
    copt.seed = rng.next_u64();
    const auto r = interactions::psi_T_cloud_series(xs, params, copt);
    if (r.truncation_tail_warning) tail_warning.store(true, std::memory_order_relaxed);
    return r.estimate.value;
  });

  const double scale = std::pow(ball, m - 1) / m_factorial;
  return {m, scale * est.value, scale * est.stderr_, opt.samples, opt.seed,
          tail_warning.load()};
}

/// d b_m / d z_r by hyperedge-rooted hypergraphs: the root factor of each
/// connected hypergraph is replaced by the z_r derivative of its edge weight,
///   pair {i,j}:   |B_i cap B_j| (1+f_ij) e^{-W_2},
///   #J >= 3:      (-1)^{#J} |cap_J B| e^{-W_J},
/// summed over root choices. Penetrable model only.
inline ClusterCoefficient db_m_dzr(int m, const MixtureParams& base,
                                   const BmOptions& opt) {
  base.validate();
  if (!base.ideal_solvent())
    throw std::invalid_argument("db_m_dzr: penetrable model required");
  if (m < 1 || m > kOrderBound)
    throw std::invalid_argument("db_m_dzr: order out of range");
  if (m == 1) return {1, 0.0, 0.0, 0, opt.seed, false};

  const auto fs = detail::free_space_for(base, m);
  const MixtureParams& params = fs.params;
  const double ball = geometry::ball_volume(fs.sample_radius);
  double m_factorial = 1.0;
  for (int i = 2; i <= m; ++i) m_factorial *= i;

  auto est = mc::sample_mean(opt.samples, opt.seed, opt.workers, [&](mc::Rng& rng) {
    std::vector<Vec3> xs(m);
    xs[0] = fs.origin;
    for (int i = 1; i < m; ++i)
      xs[i] = detail::sample_offset_in_ball(rng, fs.origin, fs.sample_radius);
    if (!detail::reach_connected(xs, params)) return 0.0;
    const auto vol = detail::subset_volumes(xs, params, opt.w_inner_samples, rng);

    // hyperedge factors and their z_r derivatives
    const std::uint32_t full = 1u << m;
    std::vector<double> factor(full, 0.0), droot(full, 0.0);
    std::vector<int> idx;
    for (std::uint32_t s = 0; s < full; ++s) {
      const int k = std::popcount(s);
      if (k < 2) continue;
      idx.clear();
      for (std::uint32_t b = s; b; b &= b - 1) idx.push_back(std::countr_zero(b));
      const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^{k-1}
      const double w = sign * params.zr * vol[s];
      if (k == 2) {
        const double opf =
            1.0 + model::mayer_f(xs[idx[0]], model::SpeciesKind::large,
                                 xs[idx[1]], model::SpeciesKind::large, params);
        factor[s] = opf * std::exp(-w) - 1.0;
        droot[s] = vol[s] * opf * std::exp(-w);
      } else {
        factor[s] = std::exp(-w) - 1.0;
        droot[s] = -sign * vol[s] * std::exp(-w);
      }
    }

    double total = 0.0;
    for (const auto& h : interactions::detail::connected_hypergraphs(m).masks) {
      for (std::size_t root = 0; root < h.size(); ++root) {
        double w = droot[h[root]];
        for (std::size_t e = 0; e < h.size() && w != 0.0; ++e)
          if (e != root) w *= factor[h[e]];
        total += w;
      }
    }
    return total;
  });

  const double scale = std::pow(ball, m - 1) / m_factorial;
  return {m, scale * est.value, scale * est.stderr_, opt.samples, opt.seed, false};
}

// ---------------------------------------------------------------------------
// Series in the effective activity.

struct CriterionViolation : std::runtime_error {
  double zhat;
  double bound;
  CriterionViolation(double zh, double b)
      : std::runtime_error("activities outside the convergence region"),
        zhat(zh),
        bound(b) {}
};

struct SeriesTerm {
  int m = 1;
  double coefficient = 0.0;
  double coeff_stderr = 0.0;
  double value = 0.0;  // coefficient * zhat^m (times m for densities)
  double value_stderr = 0.0;
};

struct SeriesResult {
  std::vector<SeriesTerm> terms;
  double total = 0.0;
  double total_stderr = 0.0;
  double zhat = 0.0;
  double zhat_stderr = 0.0;
  double solvent_term = 0.0;  // z_r, added for the penetrable pressure
  double pressure = 0.0;      // solvent_term + total
  bool criterion_satisfied = false;
  double criterion_bound = 0.0;
  double majorant_lhs = 0.0;  // sum m |b_m| zhat^m
  double majorant_rhs = 0.0;  // e^A zhat for the criterion witness A
  bool majorant_ok = false;
  bool truncation_tail_warning = false;
};

struct SeriesOptions {
  int M = 3;  // truncation order
  BmOptions bm;
  bool force = false;  // compute even when the criterion gate fails
};

namespace detail {

struct Gate {
  bool satisfied = false;
  double zhat = 0.0;
  double zhat_stderr = 0.0;
  double bound = 0.0;
  double witness_A = 0.0;
};

inline Gate criterion_gate(const MixtureParams& params, const SeriesOptions& opt) {
  Gate g;
  if (params.ideal_solvent()) {
    const auto easy = convergence::max_zhat_easy(params);
    g.zhat = effective::zhat_penetrable(params).value;
    g.bound = easy.zhat_bound;
    g.witness_A = easy.witness_A;
    g.satisfied = std::abs(g.zhat) <= g.bound;
  } else {
    effective::ZhatSeriesOptions zopt;
    zopt.samples = opt.bm.cloud.samples;
    zopt.seed = mc::substream_seed(opt.bm.seed, 0xa11);
    const auto zh = effective::zhat_colloid_series(params, zopt);
    g.zhat = zh.value;
    g.zhat_stderr = zh.stderr_;
    const auto w = convergence::witness_search_hs(params, zh.value);
    g.bound = w.admissible_zhat;
    g.witness_A = w.constants.count("a") ? w.constants.at("a") : 0.0;
    g.satisfied = w.satisfied;
  }
  return g;
}

inline std::vector<ClusterCoefficient> coefficients(const MixtureParams& params,
                                                    const SeriesOptions& opt) {
  std::vector<ClusterCoefficient> bs;
  for (int m = 1; m <= opt.M; ++m) {
    BmOptions bo = opt.bm;
    bo.seed = mc::substream_seed(opt.bm.seed, 100 + static_cast<std::uint64_t>(m));
    bs.push_back(b_m(m, params, bo));
  }
  return bs;
}

}  // namespace detail

/// Pressure series: p = z_r + sum_{m>=1} b_m zhat^m for the penetrable model
/// (the canonical series has b_1 = 1; the m = 1 term is zhat itself). Checks
/// the convergence criterion first unless forced, and reports the
/// sum m |b_m| zhat^m <= e^A zhat majorant alongside.
inline SeriesResult pressure_series(const MixtureParams& params,
                                    const SeriesOptions& opt) {
  params.validate();
  const auto gate = detail::criterion_gate(params, opt);
  if (!gate.satisfied && !opt.force)
    throw CriterionViolation(gate.zhat, gate.bound);

  SeriesResult out;
  out.zhat = gate.zhat;
  out.zhat_stderr = gate.zhat_stderr;
  out.criterion_satisfied = gate.satisfied;
  out.criterion_bound = gate.bound;
  out.solvent_term = params.ideal_solvent() ? params.zr : 0.0;

  const auto bs = detail::coefficients(params, opt);
  double zpow = 1.0;
  for (const auto& b : bs) {
    zpow *= gate.zhat;
    SeriesTerm t;
    t.m = b.m;
    t.coefficient = b.estimate;
    t.coeff_stderr = b.stderr_;
    t.value = b.estimate * zpow;
    t.value_stderr = std::hypot(b.stderr_ * zpow,
                                b.m * b.estimate * zpow / std::max(std::abs(gate.zhat), 1e-300) *
                                    gate.zhat_stderr);
    if (gate.zhat == 0.0) t.value = t.value_stderr = 0.0;
    out.terms.push_back(t);
    out.total += t.value;
    out.total_stderr = std::hypot(out.total_stderr, t.value_stderr);
    out.majorant_lhs += b.m * std::abs(b.estimate) * std::pow(std::abs(gate.zhat), b.m);
    if (b.truncation_tail_warning) out.truncation_tail_warning = true;
  }
  out.pressure = out.solvent_term + out.total;
  out.majorant_rhs = std::exp(gate.witness_A) * std::abs(gate.zhat);
  out.majorant_ok = !gate.satisfied || out.majorant_lhs <= out.majorant_rhs;
  if (!out.terms.empty()) {
    const auto& last = out.terms.back();
    if (std::abs(out.total) > 0.0 && std::abs(last.value) > 0.10 * std::abs(out.total))
      out.truncation_tail_warning = true;
  }
  return out;
}

/// rho_R = sum_{m>=1} m b_m zhat^m, built from the same coefficients as the
/// pressure (identical seeds), so the Maxwell-type relation between the two
/// truncated polynomials is exact by construction.
inline SeriesResult rho_R(const MixtureParams& params, const SeriesOptions& opt) {
  params.validate();
  const auto gate = detail::criterion_gate(params, opt);
  if (!gate.satisfied && !opt.force)
    throw CriterionViolation(gate.zhat, gate.bound);

  SeriesResult out;
  out.zhat = gate.zhat;
  out.zhat_stderr = gate.zhat_stderr;
  out.criterion_satisfied = gate.satisfied;
  out.criterion_bound = gate.bound;

  const auto bs = detail::coefficients(params, opt);
  double zpow = 1.0;
  for (const auto& b : bs) {
    zpow *= gate.zhat;
    SeriesTerm t;
    t.m = b.m;
    t.coefficient = b.estimate;
    t.coeff_stderr = b.stderr_;
    t.value = b.m * b.estimate * zpow;
    t.value_stderr = b.m * b.stderr_ * std::abs(zpow);
    out.terms.push_back(t);
    out.total += t.value;
    out.total_stderr = std::hypot(out.total_stderr, t.value_stderr);
    out.majorant_lhs += b.m * std::abs(b.estimate) * std::pow(std::abs(gate.zhat), b.m);
  }
  out.pressure = out.total;
  out.majorant_rhs = std::exp(gate.witness_A) * std::abs(gate.zhat);
  out.majorant_ok = !gate.satisfied || out.majorant_lhs <= out.majorant_rhs;
  return out;
}

/// rho_r = z_r (1 - |B(0,R+r)| rho_R + sum_{m>=2} (db_m/dz_r) zhat^m) for the
/// penetrable model, with the derivative-sum bound sum |db_m zhat^m| <=
/// e^{eps(r/R)} - 1 reported through the majorant fields.
inline SeriesResult rho_r(const MixtureParams& params, const SeriesOptions& opt) {
  params.validate();
  if (!params.ideal_solvent())
    throw std::invalid_argument("rho_r: penetrable model required");
  const auto gate = detail::criterion_gate(params, opt);
  if (!gate.satisfied && !opt.force)
    throw CriterionViolation(gate.zhat, gate.bound);

  const auto rhoR = rho_R(params, opt);

  SeriesResult out;
  out.zhat = gate.zhat;
  out.criterion_satisfied = gate.satisfied;
  out.criterion_bound = gate.bound;
  out.solvent_term = params.zr;

  double deriv_sum = 0.0, deriv_var = 0.0, deriv_abs = 0.0;
  double zpow = gate.zhat;  // zhat^1
  for (int m = 2; m <= opt.M; ++m) {
    zpow *= gate.zhat;
    BmOptions bo = opt.bm;
    bo.seed = mc::substream_seed(opt.bm.seed, 200 + static_cast<std::uint64_t>(m));
    const auto db = db_m_dzr(m, params, bo);
    SeriesTerm t;
    t.m = m;
    t.coefficient = db.estimate;
    t.coeff_stderr = db.stderr_;
    t.value = db.estimate * zpow;
    t.value_stderr = db.stderr_ * std::abs(zpow);
    out.terms.push_back(t);
    deriv_sum += t.value;
    deriv_var += t.value_stderr * t.value_stderr;
    deriv_abs += std::abs(t.value);
  }

  const double bplus = geometry::ball_volume(params.R + params.r);
  out.total = params.zr * (1.0 - bplus * rhoR.total + deriv_sum);
  out.total_stderr = std::abs(params.zr) *
                     std::hypot(bplus * rhoR.total_stderr, std::sqrt(deriv_var));
  out.pressure = out.total;
  out.majorant_lhs = deriv_abs;
  out.majorant_rhs = std::expm1(geometry::epsilon_shell(params.r / params.R));
  out.majorant_ok = !gate.satisfied || out.majorant_lhs <= out.majorant_rhs;
  return out;
}

}  // namespace renact::expansion
