#pragma once

// Ursell functions, the modified Ursell function over star/cloud graphs, the
// effective Boltzmann weights psi / psi^T, and the weighted cloud sampler
// that realizes the signed measure nu operationally.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "renact/graphs.hpp"
#include "renact/mc.hpp"
#include "renact/model.hpp"

namespace renact::interactions {

using model::Cloud;
using model::Configuration;
using model::MixtureParams;
using model::SpeciesKind;
using model::Vec3;

inline constexpr int kClusterSizeBound = 7;  // n_max for exact enumeration

// ---------------------------------------------------------------------------
// Ursell function phi^T.

/// phi^T(x_1..x_n) = sum over connected graphs on [n] of prod f(x_i, x_j).
/// Computed by the subset inclusion-exclusion equivalent of the graph sum:
/// with Z(S) = prod_{i<j in S} (1 + f_ij),
///   phi^T(S) = Z(S) - sum_{A subsetneq S, min(S) in A} phi^T(A) Z(S \ A).
/// A unit test pins this against the explicit connected-graph enumeration.
inline double ursell_phi_T(std::span<const Vec3> pts, const MixtureParams& params,
                           SpeciesKind kind = SpeciesKind::small) {
  const int n = static_cast<int>(pts.size());
  if (n < 1) throw std::invalid_argument("ursell_phi_T: need n >= 1");
  if (n > kClusterSizeBound)
    throw std::invalid_argument("ursell_phi_T: n above enumeration bound");
  if (n == 1) return 1.0;

  std::vector<double> f(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      f[i * n + j] = model::mayer_f(pts[i], kind, pts[j], kind, params);

  const std::uint32_t full = (1u << n) - 1u;
  std::vector<double> z(full + 1, 1.0), phi(full + 1, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (std::popcount(s) < 2) {
      z[s] = 1.0;
      continue;
    }
    const int v = 31 - std::countl_zero(s);  // highest vertex in s
    const std::uint32_t rest = s & ~(1u << v);
    double prod = z[rest];
    for (std::uint32_t b = rest; b && prod != 0.0; b &= b - 1) {
      const int u = std::countr_zero(b);
      prod *= 1.0 + f[u * n + v];
    }
    z[s] = prod;
  }
  for (std::uint32_t s = 1; s <= full; ++s) {
    const int lo = std::countr_zero(s);
    double acc = z[s];
    // proper submasks of s containing its lowest vertex
    const std::uint32_t others = s & ~(1u << lo);
    for (std::uint32_t sub = others; sub; sub = (sub - 1) & others) {
      const std::uint32_t a = s & ~sub;  // contains lo, proper since sub != 0
      acc -= phi[a] * z[sub];
    }
    phi[s] = acc;
  }
  return phi[full];
}

// ---------------------------------------------------------------------------
// Compiled star/cloud graph classes, cached per (m, r, class).

namespace detail {

struct CompiledStarGraphs {
  struct Entry {
    std::vector<std::pair<int, int>> star_star;   // 0-based
    std::vector<std::pair<int, int>> star_cloud;  // (star, cloud), 0-based
  };
  std::vector<Entry> graphs;
};

inline const CompiledStarGraphs& star_graphs(int m, int r, graphs::StarClass cls) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, CompiledStarGraphs> cache;
  std::scoped_lock lock(mu);
  const auto key = std::make_tuple(m, r, static_cast<int>(cls));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CompiledStarGraphs compiled;
  for (const auto& g : graphs::enumerate_bipartite_star(m, r, cls, kClusterSizeBound)) {
    CompiledStarGraphs::Entry e;
    for (auto [a, b] : g.edges) {
      if (b <= m)
        e.star_star.emplace_back(a - 1, b - 1);
      else
        e.star_cloud.emplace_back(a - 1, b - m - 1);
    }
    compiled.graphs.push_back(std::move(e));
  }
  return cache.emplace(key, std::move(compiled)).first->second;
}

struct CompiledHypergraphs {
  // per hypergraph: vertex masks of its hyperedges
  std::vector<std::vector<std::uint32_t>> masks;
};

inline const CompiledHypergraphs& connected_hypergraphs(int m) {
  static std::mutex mu;
  static std::map<int, CompiledHypergraphs> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  CompiledHypergraphs compiled;
  for (const auto& h : graphs::enumerate_connected_hypergraphs(m, 4)) {
    std::vector<std::uint32_t> masks;
    for (const auto& he : h.hyperedges) {
      std::uint32_t mask = 0;
      for (int v : he) mask |= 1u << (v - 1);  // 0-based bit per star
      masks.push_back(mask);
    }
    compiled.masks.push_back(std::move(masks));
  }
  return cache.emplace(m, std::move(compiled)).first->second;
}

struct PairTables {
  int m = 0, r = 0;
  std::vector<double> f;     // m x m Mayer values among stars
  std::vector<double> zeta;  // m x r
  double ff(int i, int j) const { return f[i * m + j]; }
  double zz(int s, int k) const { return zeta[s * r + k]; }
};

inline PairTables pair_tables(const Configuration& config,
                              const MixtureParams& params, bool corona) {
  PairTables t;
  t.m = static_cast<int>(config.large.size());
  t.r = static_cast<int>(config.clouds.size());
  t.f.assign(t.m * t.m, 0.0);
  for (int i = 0; i < t.m; ++i)
    for (int j = i + 1; j < t.m; ++j)
      t.f[i * t.m + j] = t.f[j * t.m + i] =
          model::mayer_f(config.large[i], SpeciesKind::large, config.large[j],
                         SpeciesKind::large, params);
  t.zeta.assign(t.m * t.r, 0.0);
  for (int s = 0; s < t.m; ++s)
    for (int k = 0; k < t.r; ++k)
      t.zeta[s * t.r + k] = corona
                                ? model::zeta_tilde(config.large[s], config.clouds[k], params)
                                : model::zeta(config.large[s], config.clouds[k], params);
  return t;
}

}  // namespace detail

/// Modified Ursell function phi*^T: sum over the connected leaf-constrained
/// graphs C*_{m,r} of prod f(x_s, x_t) * prod zeta(x_s, Y_k). For r = 0 this
/// is the ordinary Ursell sum over C_m with large-large Mayer weights.
inline double phi_star_T(const Configuration& config, const MixtureParams& params) {
  const int m = static_cast<int>(config.large.size());
  const int r = static_cast<int>(config.clouds.size());
  if (m < 1) throw std::invalid_argument("phi_star_T: need m >= 1");
  if (m + r > kClusterSizeBound)
    throw std::invalid_argument("phi_star_T: m + r above enumeration bound");

  const auto& compiled = detail::star_graphs(m, r, graphs::StarClass::connected);
  if (compiled.graphs.empty()) return 0.0;
  const auto tables = detail::pair_tables(config, params, /*corona=*/false);

  double total = 0.0;
  for (const auto& g : compiled.graphs) {
    double w = 1.0;
    for (auto [i, j] : g.star_star) {
      w *= tables.ff(i, j);
      if (w == 0.0) break;
    }
    if (w != 0.0)
      for (auto [s, k] : g.star_cloud) {
        w *= tables.zz(s, k);
        if (w == 0.0) break;
      }
    total += w;
  }
  return total;
}

/// Tree-graph majorant: sum over T*_{m,r} of prod |f| * prod |zeta_tilde|.
/// phi*^T is bounded by this in absolute value (the tree-graph inequality).
inline double tree_graph_majorant(const Configuration& config,
                                  const MixtureParams& params) {
  const int m = static_cast<int>(config.large.size());
  const int r = static_cast<int>(config.clouds.size());
  if (m < 1) throw std::invalid_argument("tree_graph_majorant: need m >= 1");
  if (m + r > kClusterSizeBound)
    throw std::invalid_argument("tree_graph_majorant: size above bound");

  const auto& compiled = detail::star_graphs(m, r, graphs::StarClass::trees);
  const auto tables = detail::pair_tables(config, params, /*corona=*/true);
  // |f| needs the plain Mayer values as well
  const auto plain = detail::pair_tables(config, params, /*corona=*/false);

  double total = 0.0;
  for (const auto& g : compiled.graphs) {
    double w = 1.0;
    for (auto [i, j] : g.star_star) {
      w *= std::abs(plain.ff(i, j));
      if (w == 0.0) break;
    }
    if (w != 0.0)
      for (auto [s, k] : g.star_cloud) {
        w *= std::abs(tables.zz(s, k));
        if (w == 0.0) break;
      }
    total += w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Effective Boltzmann weights.

/// W_{#J} supplier: J is a set of 0-based indices into the pinned large
/// positions. The effective module provides implementations.
using WProvider = std::function<double(std::span<const int>)>;

/// psi(x_1..x_m) = prod (1 + f) * exp(-sum_J W_{#J}); psi of one point is 1.
/// Hard cores short-circuit to exact 0 before any W evaluation.
inline double psi(std::span<const Vec3> xs, const MixtureParams& params,
                  const WProvider& w_provider) {
  const int m = static_cast<int>(xs.size());
  if (m < 1) throw std::invalid_argument("psi: need m >= 1");
  if (m == 1) return 1.0;
  double hard = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      hard *= 1.0 + model::mayer_f(xs[i], SpeciesKind::large, xs[j],
                                   SpeciesKind::large, params);
  if (hard == 0.0) return 0.0;

  double w_sum = 0.0;
  std::vector<int> idx;
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    if (std::popcount(s) < 2) continue;
    idx.clear();
    for (std::uint32_t b = s; b; b &= b - 1) idx.push_back(std::countr_zero(b));
    w_sum += w_provider(idx);
  }
  return hard * std::exp(-w_sum);
}

/// psi^T by the connected-hypergraph expansion: pair hyperedges contribute
/// (1+f) e^{-W_2} - 1, larger hyperedges e^{-W_{#J}} - 1. Exact given W.
inline double psi_T_hypergraph(std::span<const Vec3> xs, const MixtureParams& params,
                               const WProvider& w_provider) {
  const int m = static_cast<int>(xs.size());
  if (m < 2) throw std::invalid_argument("psi_T_hypergraph: need m >= 2");
  if (m > 4) throw std::invalid_argument("psi_T_hypergraph: m above hypergraph bound");

  // factor per hyperedge vertex mask
  std::vector<double> factor(1u << m, 0.0);
  std::vector<int> idx;
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    if (std::popcount(s) < 2) continue;
    idx.clear();
    for (std::uint32_t b = s; b; b &= b - 1) idx.push_back(std::countr_zero(b));
    const double w = w_provider(idx);
    if (std::popcount(s) == 2) {
      const double one_plus_f =
          1.0 + model::mayer_f(xs[idx[0]], SpeciesKind::large, xs[idx[1]],
                               SpeciesKind::large, params);
      factor[s] = one_plus_f * std::exp(-w) - 1.0;
    } else {
      factor[s] = std::exp(-w) - 1.0;
    }
  }

  double total = 0.0;
  for (const auto& h : detail::connected_hypergraphs(m).masks) {
    double w = 1.0;
    for (std::uint32_t em : h) {
      w *= factor[em];
      if (w == 0.0) break;
    }
    total += w;
  }
  return total;
}

// ---------------------------------------------------------------------------
// The nu sampler: importance-sampled integrals against the cloud measure.

namespace detail {

/// First-point proposal: uniform mixture of equal-radius balls. Density is
/// with respect to Lebesgue measure on R^3 (box indicators belong to the
/// integrand, not the proposal).
struct BallMixture {
  std::vector<Vec3> centers;
  double radius = 0.0;

  Vec3 sample(mc::Rng& rng, const MixtureParams& params) const {
    const Vec3& c = centers[rng.uniform_index(centers.size())];
    Vec3 p;
    while (true) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        p[i] = rng.uniform(-1.0, 1.0);
        s += p[i] * p[i];
      }
      if (s <= 1.0) break;
    }
    for (int i = 0; i < 3; ++i) p[i] = c[i] + radius * p[i];
    return params.wrap(p);
  }

  double density(const Vec3& y, const MixtureParams& params) const {
    const double vb = geometry::ball_volume(radius);
    int hits = 0;
    for (const Vec3& c : centers)
      if (params.distance(y, c) < radius) ++hits;
    return hits / (vb * static_cast<double>(centers.size()));
  }
};

/// Grow a k-point cloud: first point from the mixture, each further point
/// uniform in the 2r-ball of a uniformly chosen earlier point. Returns the
/// symmetrized proposal density p(Y) = (1/k!) sum_sigma q(Y_sigma), whose
/// support covers every 2r-connected cloud meeting the mixture balls.
struct CloudProposal {
  BallMixture first;
  double grow_radius = 0.0;  // 2r

  Cloud sample(mc::Rng& rng, int k, const MixtureParams& params) const {
    Cloud y;
    y.points.reserve(k);
    y.points.push_back(first.sample(rng, params));
    for (int j = 1; j < k; ++j) {
      const Vec3& base = y.points[rng.uniform_index(y.points.size())];
      Vec3 p;
      while (true) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
          p[i] = rng.uniform(-1.0, 1.0);
          s += p[i] * p[i];
        }
        if (s <= 1.0) break;
      }
      for (int i = 0; i < 3; ++i) p[i] = base[i] + grow_radius * p[i];
      y.points.push_back(params.wrap(p));
    }
    return y;
  }

  double ordered_density(std::span<const Vec3> y, const MixtureParams& params) const {
    double q = first.density(y[0], params);
    const double vg = geometry::ball_volume(grow_radius);
    for (std::size_t j = 1; j < y.size() && q != 0.0; ++j) {
      int near = 0;
      for (std::size_t i = 0; i < j; ++i)
        if (params.distance(y[j], y[i]) < grow_radius) ++near;
      q *= near / (vg * static_cast<double>(j));
    }
    return q;
  }

  double symmetrized_density(const Cloud& cloud, const MixtureParams& params) const {
    const int k = cloud.size();
    if (k == 1) return first.density(cloud.points[0], params);
    std::vector<Vec3> perm = cloud.points;
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    double sum = 0.0;
    std::uint64_t count = 0;
    do {
      for (int i = 0; i < k; ++i) perm[i] = cloud.points[order[i]];
      sum += ordered_density(perm, params);
      ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    return sum / static_cast<double>(count);
  }
};

inline bool inside_box(const Vec3& p, const geometry::BoxSpec& box) {
  for (double c : p)
    if (c < 0.0 || c > box.side) return false;
  return true;
}

}  // namespace detail

struct NuTermResult {
  mc::MCEstimate estimate;
  int cloud_size = 1;
};

/// Stratum k of the nu integral: (z_r^k / k!) int_{Lambda^k} g(Y) phi^T_ss(Y) dy,
/// importance-sampled around the anchor points with reach `anchor_reach`
/// (clouds with g * phi^T != 0 necessarily stay within
/// anchor_reach + 2r(k-1) of every anchor they must touch).
template <class G>
mc::MCEstimate nu_term_k(const MixtureParams& params, int k,
                         std::span<const Vec3> anchors, double anchor_reach,
                         std::uint64_t samples, std::uint64_t seed, int workers,
                         G&& g) {
  if (k < 1 || k > kClusterSizeBound)
    throw std::invalid_argument("nu_term_k: cloud size out of range");
  if (anchors.empty()) throw std::invalid_argument("nu_term_k: no anchor points");
  params.validate();

  const double rho0 = anchor_reach + 2.0 * params.r * (k - 1);
  detail::CloudProposal proposal;
  proposal.grow_radius = 2.0 * params.r;
  proposal.first.radius = rho0;
  proposal.first.centers.assign(anchors.begin(), anchors.end());

  const bool ball_ok = !params.periodic() || 2.0 * rho0 < params.box.side;
  if (!ball_ok) {
    // Importance ball would wrap onto itself; fall back to uniform box
    // sampling for the first point via a single huge "ball" is not valid,
    // so refuse rather than silently bias.
    throw std::invalid_argument("nu_term_k: importance ball exceeds half box");
  }

  double log_k_factorial = 0.0;
  for (int i = 2; i <= k; ++i) log_k_factorial += std::log(static_cast<double>(i));
  const double prefactor = std::pow(params.zr, k) / std::exp(log_k_factorial);

  auto est = mc::sample_mean(samples, seed, workers, [&](mc::Rng& rng) {
    const Cloud y = proposal.sample(rng, k, params);
    if (!params.periodic())
      for (const Vec3& p : y.points)
        if (!detail::inside_box(p, params.box)) return 0.0;
    double phi_ss = 1.0;
    if (k >= 2) {
      if (params.ideal_solvent()) return 0.0;  // phi^T_ss vanishes
      phi_ss = ursell_phi_T(y.points, params, SpeciesKind::small);
      if (phi_ss == 0.0) return 0.0;
    }
    const double gv = g(y);
    if (gv == 0.0) return 0.0;
    const double p = proposal.symmetrized_density(y, params);
    return gv * phi_ss / p;
  });
  return est.scaled(prefactor);
}

struct NuIntegralResult {
  mc::MCEstimate total;
  std::vector<mc::MCEstimate> per_size;  // index 0 <-> cloud size 1
  bool truncation_tail_warning = false;
};

/// Full nu integral int g dnu truncated at cloud size k_max, stratified by
/// size. The tail flag is raised when the k_max stratum exceeds
/// `tail_fraction` of the running total in magnitude.
template <class G>
NuIntegralResult nu_integral(const MixtureParams& params,
                             std::span<const Vec3> anchors, double anchor_reach,
                             int k_max, std::uint64_t samples, std::uint64_t seed,
                             int workers, G&& g, double tail_fraction = 0.10) {
  if (k_max < 1) throw std::invalid_argument("nu_integral: k_max >= 1");
  NuIntegralResult out;
  const int k_eff = params.ideal_solvent() ? 1 : k_max;
  for (int k = 1; k <= k_eff; ++k) {
    auto est = nu_term_k(params, k, anchors, anchor_reach, samples,
                         mc::substream_seed(seed, static_cast<std::uint64_t>(k)),
                         workers, g);
    out.per_size.push_back(est);
  }
  mc::MCEstimate total = mc::MCEstimate::exact(0.0, seed);
  for (const auto& t : out.per_size) total = total + t;
  total.seed = seed;
  out.total = total;
  if (!params.ideal_solvent() && k_max >= 2) {
    const double last = std::abs(out.per_size.back().value);
    const double run = std::abs(out.total.value);
    if (run > 0.0 && last > tail_fraction * run) out.truncation_tail_warning = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// psi^T via the cloud series.

struct CloudSeriesOptions {
  int r_max = 3;          // cloud-count truncation
  int k_max = 3;          // per-cloud size truncation (colloid only)
  std::uint64_t samples = 1u << 17;
  std::uint64_t seed = 0;
  int workers = 1;
  double tail_fraction = 0.10;
};

struct CloudSeriesResult {
  mc::MCEstimate estimate;
  std::vector<mc::MCEstimate> terms;  // index r = 0 .. r_max
  bool truncation_tail_warning = false;
};

/// psi^T(x_1..x_m) = sum_{r>=0} (1/r!) int phi*^T(x; Y_1..Y_r) dnu^r,
/// truncated at r_max clouds. Cloud sizes are randomized (uniform over
/// 1..k_max) and reweighted; for ideal solvents only size-1 clouds occur.
inline CloudSeriesResult psi_T_cloud_series(std::span<const Vec3> xs,
                                            const MixtureParams& params,
                                            const CloudSeriesOptions& opt) {
  const int m = static_cast<int>(xs.size());
  if (m < 2) throw std::invalid_argument("psi_T_cloud_series: need m >= 2");
  params.validate();

  CloudSeriesResult out;

  // r = 0: ordinary Ursell sum over the large points, exact.
  out.terms.push_back(mc::MCEstimate::exact(
      ursell_phi_T(xs, params, SpeciesKind::large), opt.seed));

  const int k_eff = params.ideal_solvent() ? 1 : std::max(1, opt.k_max);
  const double pk = 1.0 / static_cast<double>(k_eff);

  // Proposal mixture for a cloud's first point: every cloud in a nonzero
  // graph touches >= 2 exclusion balls, so it lies in a ball of radius
  // (R + r) + 2r(k-1) around some pair midpoint (around the point itself
  // for m = 1 anchors, which cannot happen here since m >= 2).
  std::vector<Vec3> midpoints;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Vec3 mid;
      for (int c = 0; c < 3; ++c) {
        double delta = xs[j][c] - xs[i][c];
        if (params.periodic())
          delta = geometry::periodic_axis_delta(delta, params.box.side);
        mid[c] = xs[i][c] + 0.5 * delta;
      }
      midpoints.push_back(params.wrap(mid));
    }

  for (int r = 1; r <= opt.r_max; ++r) {
    const double rho0 = (params.R + params.r) + 2.0 * params.r * (k_eff - 1);
    if (params.periodic() && 2.0 * rho0 >= params.box.side)
      throw std::invalid_argument("psi_T_cloud_series: importance ball exceeds half box");

    detail::CloudProposal proposal;
    proposal.grow_radius = 2.0 * params.r;
    proposal.first.radius = rho0;
    proposal.first.centers = midpoints;

    double log_r_factorial = 0.0;
    for (int i = 2; i <= r; ++i) log_r_factorial += std::log(static_cast<double>(i));

    auto est = mc::sample_mean(
        opt.samples, mc::substream_seed(opt.seed, static_cast<std::uint64_t>(r)),
        opt.workers, [&](mc::Rng& rng) {
          Configuration config;
          config.large.assign(xs.begin(), xs.end());
          double weight = 1.0;
          for (int c = 0; c < r; ++c) {
            const int k = 1 + static_cast<int>(rng.uniform_index(k_eff));
            Cloud y = proposal.sample(rng, k, params);
            if (!params.periodic())
              for (const Vec3& p : y.points)
                if (!detail::inside_box(p, params.box)) return 0.0;
            double phi_ss = 1.0;
            if (k >= 2) {
              phi_ss = ursell_phi_T(y.points, params, SpeciesKind::small);
              if (phi_ss == 0.0) return 0.0;
            }
            double log_kf = 0.0;
            for (int i = 2; i <= k; ++i) log_kf += std::log(static_cast<double>(i));
            const double p = proposal.symmetrized_density(y, params);
            weight *= std::pow(params.zr, k) / std::exp(log_kf) * phi_ss / (p * pk);
            config.clouds.push_back(std::move(y));
          }
          const double v = phi_star_T(config, params);
          return v == 0.0 ? 0.0 : weight * v;
        });
    out.terms.push_back(est.scaled(1.0 / std::exp(log_r_factorial)));
  }

  mc::MCEstimate total = mc::MCEstimate::exact(0.0, opt.seed);
  for (const auto& t : out.terms) total = total + t;
  total.seed = opt.seed;
  out.estimate = total;
  const double last = std::abs(out.terms.back().value);
  if (std::abs(total.value) > 0.0 && last > opt.tail_fraction * std::abs(total.value))
    out.truncation_tail_warning = true;
  return out;
}

}  // namespace renact::interactions
