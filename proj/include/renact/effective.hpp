#pragma once

// Effective activities zhat_R and effective multi-body potentials W_{#J}:
// closed forms for the penetrable model, cloud-series and finite-volume-ratio
// evaluations for the colloid model.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "renact/geometry.hpp"
#include "renact/interactions.hpp"
#include "renact/mc.hpp"
#include "renact/model.hpp"

namespace renact::effective {

using model::MixtureParams;
using model::Vec3;

struct EffectivePotentialValue {
  int J_size = 2;
  double value = 0.0;    // W_{#J}
  double stderr_ = 0.0;  // zero for analytic paths
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool truncation_tail_warning = false;
};

enum class ZhatMode { penetrable_exact, colloid_series, finite_volume_ratio };

struct EffectiveActivity {
  double value = 0.0;     // z_R * exp(exponent)
  double exponent = 0.0;  // the log-correction A
  ZhatMode mode = ZhatMode::penetrable_exact;
  double stderr_ = 0.0;
  bool truncation_tail_warning = false;
};

namespace detail {

inline std::vector<geometry::BallSpec> exclusion_balls(std::span<const Vec3> xs,
                                                       const MixtureParams& params) {
  std::vector<geometry::BallSpec> balls;
  balls.reserve(xs.size());
  for (const Vec3& x : xs)
    balls.push_back({{x[0], x[1], x[2]}, params.R + params.r});
  return balls;
}

}  // namespace detail

/// W_k(x_1..x_k) = z_r (-1)^{k-1} |B(x_1,R+r) cap ... cap B(x_k,R+r)|.
/// Analytic for k = 2 (lens), Monte Carlo for k >= 3.
inline EffectivePotentialValue w_J_penetrable(std::span<const Vec3> xJ,
                                              const MixtureParams& params,
                                              std::uint64_t samples = 1u << 16,
                                              std::uint64_t seed = 0,
                                              int workers = 1) {
  params.validate();
  if (params.model != model::ModelKind::penetrable)
    throw std::invalid_argument("w_J_penetrable: penetrable model required");
  const int k = static_cast<int>(xJ.size());
  if (k < 2) throw std::invalid_argument("w_J_penetrable: need #J >= 2");

  const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // (-1)^{k-1}
  EffectivePotentialValue out;
  out.J_size = k;
  out.seed = seed;

  if (k == 2) {
    const double s = params.distance(xJ[0], xJ[1]);
    out.value = sign * params.zr * geometry::lens_volume(params.R + params.r, s);
    return out;
  }

  geometry::KIntersectOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  opt.workers = workers;
  if (params.periodic()) opt.periodic_L = params.box.side;
  const auto vol = geometry::k_intersection_volume(detail::exclusion_balls(xJ, params), opt);
  out.value = sign * params.zr * vol.value;
  out.stderr_ = std::abs(params.zr) * vol.stderr_;
  out.samples = vol.samples;
  return out;
}

/// W_{#J} from the cloud measure: -W = int prod_j zeta(x_j, Y) dnu(Y),
/// truncated at cloud size k_max. Reproduces the penetrable closed form when
/// the solvent is ideal (only size-1 clouds carry weight).
inline EffectivePotentialValue w_J_cloud_series(std::span<const Vec3> xJ,
                                                const MixtureParams& params,
                                                int k_max = 3,
                                                std::uint64_t samples = 1u << 17,
                                                std::uint64_t seed = 0,
                                                int workers = 1) {
  params.validate();
  const int k = static_cast<int>(xJ.size());
  if (k < 2) throw std::invalid_argument("w_J_cloud_series: need #J >= 2");

  EffectivePotentialValue out;
  out.J_size = k;
  out.seed = seed;
  out.samples = samples;
  if (params.zr == 0.0) return out;  // nu vanishes

  auto g = [&](const model::Cloud& y) {
    double prod = 1.0;
    for (const Vec3& x : xJ) {
      prod *= model::zeta(x, y, params);
      if (prod == 0.0) return 0.0;
    }
    return prod;
  };
  const auto integral = interactions::nu_integral(
      params, xJ, params.R + params.r, k_max, samples, seed, workers, g);
  out.value = -integral.total.value;
  out.stderr_ = integral.total.stderr_;
  out.truncation_tail_warning = integral.truncation_tail_warning;
  return out;
}

/// |B(x, rho) cap [0,L]^3| for a free box: exact when the ball is interior or
/// cut by a single face, Monte Carlo hit-testing otherwise.
inline mc::MCEstimate ball_box_clip_volume(const Vec3& x, double rho,
                                           const geometry::BoxSpec& box,
                                           std::uint64_t samples = 1u << 16,
                                           std::uint64_t seed = 0) {
  box.validate();
  int cut_faces = 0;
  double cut_depth = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (const double t : {x[c], box.side - x[c]}) {
      if (t < rho) {
        ++cut_faces;
        cut_depth = t;
      }
    }
  }
  if (cut_faces == 0) return mc::MCEstimate::exact(geometry::ball_volume(rho), seed);
  if (cut_faces == 1)
    return mc::MCEstimate::exact(
        geometry::ball_volume(rho) - geometry::cap_volume(rho, rho - cut_depth), seed);

  auto est = mc::sample_mean(samples, seed, 1, [&, buf = std::vector<double>()](mc::Rng& rng) mutable {
    geometry::detail::sample_in_ball(rng, std::span<const double>(x.data(), 3), rho, buf);
    for (double c : buf)
      if (c < 0.0 || c > box.side) return 0.0;
    return 1.0;
  });
  const double vb = geometry::ball_volume(rho);
  return {vb * est.value, vb * est.stderr_, samples, seed};
}

/// zhat_R = z_R exp(-z_r |B(0,R+r)|): exact for the penetrable model.
inline EffectiveActivity zhat_penetrable(const MixtureParams& params) {
  params.validate();
  if (params.model != model::ModelKind::penetrable)
    throw std::invalid_argument("zhat_penetrable: penetrable model required");
  EffectiveActivity out;
  out.mode = ZhatMode::penetrable_exact;
  out.exponent = -params.zr * geometry::ball_volume(params.R + params.r);
  out.value = params.zR * std::exp(out.exponent);
  return out;
}

struct ZhatSeriesOptions {
  int n_max = 2;  // cloud-size truncation of A(x; z_r)
  std::uint64_t samples = 1u << 17;
  std::uint64_t seed = 0;
  int workers = 1;
  double tail_fraction = 0.10;
};

/// zhat_R = z_R exp(A) with A = sum_{n=1}^{n_max} cloud terms. The n = 1 term
/// is -z_r |B(0,R+r)| exactly; n >= 2 terms carry the O(z_r^2) corrections
/// and vanish identically for ideal solvents. Homogeneous (bulk / periodic).
inline EffectiveActivity zhat_colloid_series(const MixtureParams& params,
                                             const ZhatSeriesOptions& opt = {}) {
  params.validate();
  EffectiveActivity out;
  out.mode = ZhatMode::colloid_series;
  const double a1 = -params.zr * geometry::ball_volume(params.R + params.r);
  double a = a1;
  double var = 0.0;
  if (!params.ideal_solvent() && opt.n_max >= 2 && params.zr != 0.0) {
    const Vec3 x{0.5 * params.box.side, 0.5 * params.box.side, 0.5 * params.box.side};
    double last = a1;
    for (int n = 2; n <= opt.n_max; ++n) {
      auto term = interactions::nu_term_k(
          params, n, std::span<const Vec3>(&x, 1), params.R + params.r,
          opt.samples, mc::substream_seed(opt.seed, static_cast<std::uint64_t>(n)),
          opt.workers, [&](const model::Cloud& y) { return model::zeta(x, y, params); });
      a += term.value;
      var += term.stderr_ * term.stderr_;
      last = term.value;
    }
    if (std::abs(a) > 0.0 && std::abs(last) > opt.tail_fraction * std::abs(a))
      out.truncation_tail_warning = true;
  }
  out.exponent = a;
  out.value = params.zR * std::exp(a);
  out.stderr_ = std::abs(out.value) * std::sqrt(var);
  return out;
}

struct ZhatRatioOptions {
  int n2_max = 40;  // solvent particle-number truncation (colloid)
  std::uint64_t samples = 1u << 16;
  std::uint64_t seed = 0;
};

/// Finite-volume ratio form zhat_{Lambda,R}(x) = z_R Xi_{Lambda \ B(x,R+r)} /
/// Xi_Lambda for the solvent alone. Penetrable solvents reduce to
/// exp(-z_r |B(x,R+r) cap Lambda|); colloid solvents are estimated by direct
/// truncated-ensemble sampling.
inline EffectiveActivity zhat_finite_volume_ratio(const MixtureParams& params,
                                                  const Vec3& x,
                                                  const ZhatRatioOptions& opt = {}) {
  params.validate();
  EffectiveActivity out;
  out.mode = ZhatMode::finite_volume_ratio;

  const double rho = params.R + params.r;
  if (params.ideal_solvent()) {
    const auto clip = params.periodic()
                          ? mc::MCEstimate::exact(geometry::ball_volume(rho), opt.seed)
                          : ball_box_clip_volume(x, rho, params.box, opt.samples, opt.seed);
    out.exponent = -params.zr * clip.value;
    out.value = params.zR * std::exp(out.exponent);
    out.stderr_ = std::abs(out.value) * std::abs(params.zr) * clip.stderr_;
    return out;
  }

  // Colloid solvent: Xi estimated term by term; shared samples are not needed
  // since the two ensembles differ by the excluded ball.
  if (params.zr < 0.0)
    throw std::invalid_argument("zhat_finite_volume_ratio: colloid ratio needs z_r >= 0");
  const double volume = params.box.volume();
  auto xi_terms = [&](bool exclude_ball) {
    double xi = 1.0, var = 0.0;
    for (int n2 = 1; n2 <= opt.n2_max; ++n2) {
      double log_w = n2 * std::log(std::max(params.zr, 0.0) * volume);
      for (int i = 2; i <= n2; ++i) log_w -= std::log(static_cast<double>(i));
      const double w = std::exp(log_w);
      if (w == 0.0) break;
      auto p = mc::sample_mean(
          opt.samples,
          mc::substream_seed(opt.seed, static_cast<std::uint64_t>(n2) * 2 + exclude_ball),
          1, [&](mc::Rng& rng) {
            std::vector<Vec3> ys(n2);
            for (auto& y : ys)
              for (int c = 0; c < 3; ++c) y[c] = rng.uniform(0.0, params.box.side);
            for (int i = 0; i < n2; ++i) {
              if (exclude_ball && params.distance(ys[i], x) < rho) return 0.0;
              for (int j = i + 1; j < n2; ++j)
                if (params.distance(ys[i], ys[j]) < 2.0 * params.r) return 0.0;
            }
            return 1.0;
          });
      xi += w * p.value;
      var += w * w * p.stderr_ * p.stderr_;
    }
    return std::pair<double, double>{xi, var};
  };
  const auto [xi_full, var_full] = xi_terms(false);
  const auto [xi_excl, var_excl] = xi_terms(true);
  const double ratio = xi_excl / xi_full;
  out.exponent = std::log(ratio);
  out.value = params.zR * ratio;
  out.stderr_ = std::abs(params.zR) * ratio *
                std::sqrt(var_excl / (xi_excl * xi_excl) + var_full / (xi_full * xi_full));
  return out;
}

}  // namespace renact::effective
