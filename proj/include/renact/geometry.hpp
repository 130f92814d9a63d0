#pragma once

// Sphere-intersection geometry in R^d (d = 3 throughout the model layer):
// exact ball/cap/lens/corona volumes, periodic minimum-image distance, and a
// Monte Carlo estimator for k-fold ball intersection volumes.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "renact/mc.hpp"

namespace renact::geometry {

enum class Boundary { periodic, free_space };

/// Cubic box [0,L]^d. For periodic use with spheres of reach rho the caller
/// must keep L > 2*rho (checked at the use sites, not here).
struct BoxSpec {
  double side = 0.0;
  Boundary boundary = Boundary::periodic;
  int dim = 3;

  void validate() const {
    if (side <= 0.0) throw std::invalid_argument("BoxSpec: side must be > 0");
    if (dim < 1) throw std::invalid_argument("BoxSpec: dim must be >= 1");
  }
  double volume() const { return std::pow(side, dim); }
};

struct BallSpec {
  std::vector<double> center;
  double radius = 0.0;

  int dim() const { return static_cast<int>(center.size()); }
  void validate() const {
    if (radius <= 0.0) throw std::invalid_argument("BallSpec: radius must be > 0");
    if (center.empty()) throw std::invalid_argument("BallSpec: empty center");
  }
};

/// Volume of the unit ball in dimension d. Closed form for d in {1,2,3},
/// gamma-function form otherwise.
inline double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("unit_ball_volume: d must be >= 1");
  switch (d) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default:
      return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  }
}

inline double ball_volume(double radius, int d = 3) {
  if (radius < 0.0) throw std::invalid_argument("ball_volume: radius must be >= 0");
  return unit_ball_volume(d) * std::pow(radius, d);
}

/// Spherical cap of height h cut from a ball of radius rho (d = 3).
inline double cap_volume(double rho, double h) {
  if (rho < 0.0 || h < 0.0) throw std::invalid_argument("cap_volume: negative input");
  h = std::min(h, 2.0 * rho);
  return std::numbers::pi * h * h * (3.0 * rho - h) / 3.0;
}

/// Intersection volume of two balls of equal radius rho at center distance
/// dist (d = 3): (pi/12)(4 rho + s)(2 rho - s)^2 for s < 2 rho, else 0.
inline double lens_volume(double rho, double dist) {
  if (rho <= 0.0) throw std::invalid_argument("lens_volume: radius must be > 0");
  if (dist < 0.0) throw std::invalid_argument("lens_volume: negative distance");
  if (dist >= 2.0 * rho) return 0.0;
  const double s = dist;
  return std::numbers::pi / 12.0 * (4.0 * rho + s) * (2.0 * rho - s) * (2.0 * rho - s);
}

/// Intersection volume of two balls with arbitrary radii (d = 3).
inline double two_ball_overlap(double rho1, double rho2, double dist) {
  if (rho1 <= 0.0 || rho2 <= 0.0 || dist < 0.0)
    throw std::invalid_argument("two_ball_overlap: bad input");
  if (dist >= rho1 + rho2) return 0.0;
  if (dist <= std::abs(rho1 - rho2)) return ball_volume(std::min(rho1, rho2));
  const double s = dist, a = rho1, b = rho2;
  return std::numbers::pi * (a + b - s) * (a + b - s) *
         (s * s + 2.0 * s * (a + b) - 3.0 * (a - b) * (a - b)) / (12.0 * s);
}

/// Depletion-shell volume |B(0,R+r)| - |B(0,R-r)| for R > r > 0 (d = 3).
inline double corona_volume(double R, double r) {
  if (!(R > r && r > 0.0))
    throw std::invalid_argument("corona_volume: need R > r > 0");
  return ball_volume(R + r) - ball_volume(R - r);
}

/// epsilon(h) = [(1+h)^3 - (1-h)^3]/8 = (3h + h^3)/4, the corona-to-|B(0,2R)|
/// volume ratio at h = r/R.
inline double epsilon_shell(double h) { return (3.0 * h + h * h * h) / 4.0; }

inline double periodic_axis_delta(double dx, double L) {
  return dx - L * std::round(dx / L);
}

inline double periodic_distance(std::span<const double> x,
                                std::span<const double> y, double L) {
  if (L <= 0.0) throw std::invalid_argument("periodic_distance: L must be > 0");
  if (x.size() != y.size())
    throw std::invalid_argument("periodic_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = periodic_axis_delta(x[i] - y[i], L);
    s += d * d;
  }
  return std::sqrt(s);
}

inline double euclidean_distance(std::span<const double> x,
                                 std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("euclidean_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

struct KIntersectOptions {
  std::uint64_t samples = 1u << 16;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Periodic minimum-image metric with this box side; free space if absent.
  std::optional<double> periodic_L = std::nullopt;
  /// Skip the exact k <= 2 short-circuits (used to exercise the sampler
  /// against the closed forms).
  bool force_mc = false;
};

namespace detail {

inline double pair_distance(const BallSpec& a, const BallSpec& b,
                            const std::optional<double>& L) {
  return L ? periodic_distance(a.center, b.center, *L)
           : euclidean_distance(a.center, b.center);
}

inline void sample_in_ball(mc::Rng& rng, std::span<const double> center,
                           double radius, std::vector<double>& out) {
  const int d = static_cast<int>(center.size());
  out.resize(d);
  while (true) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      out[i] = rng.uniform(-1.0, 1.0);
      s += out[i] * out[i];
    }
    if (s <= 1.0) break;
  }
  for (int i = 0; i < d; ++i) out[i] = center[i] + radius * out[i];
}

inline bool inside_ball(std::span<const double> p, const BallSpec& b,
                        const std::optional<double>& L) {
  const double dist = L ? periodic_distance(p, b.center, *L)
                        : euclidean_distance(p, b.center);
  return dist < b.radius;
}

}  // namespace detail

/// Unbiased MC estimate of |B_1 cap ... cap B_k|: sample uniformly inside the
/// smallest ball, test membership in the others. Exact short-circuits for
/// pairwise-disjoint inputs and for k <= 2 after removing redundant
/// (containing or duplicate) balls.
inline mc::MCEstimate k_intersection_volume(const std::vector<BallSpec>& balls,
                                            const KIntersectOptions& opt = {}) {
  if (balls.empty())
    throw std::invalid_argument("k_intersection_volume: empty ball list");
  const int d = balls.front().dim();
  for (const auto& b : balls) {
    b.validate();
    if (b.dim() != d)
      throw std::invalid_argument("k_intersection_volume: dimension mismatch");
  }

  // Drop any ball that contains another one; the intersection is unchanged.
  std::vector<BallSpec> reduced;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < balls.size() && !redundant; ++j) {
      if (i == j) continue;
      const double s = detail::pair_distance(balls[i], balls[j], opt.periodic_L);
      // ball j inside ball i (ties resolved by index to keep one copy)
      if (s + balls[j].radius <= balls[i].radius &&
          (balls[j].radius < balls[i].radius || j < i))
        redundant = true;
    }
    if (!redundant) reduced.push_back(balls[i]);
  }

  for (std::size_t i = 0; i < reduced.size(); ++i)
    for (std::size_t j = i + 1; j < reduced.size(); ++j)
      if (detail::pair_distance(reduced[i], reduced[j], opt.periodic_L) >=
          reduced[i].radius + reduced[j].radius)
        return mc::MCEstimate::exact(0.0, opt.seed);

  if (!opt.force_mc) {
    if (reduced.size() == 1)
      return mc::MCEstimate::exact(ball_volume(reduced[0].radius, d), opt.seed);
    if (reduced.size() == 2 && d == 3) {
      const double s =
          detail::pair_distance(reduced[0], reduced[1], opt.periodic_L);
      // The closed form assumes the lens is not wrapped around the torus.
      if (!opt.periodic_L || reduced[0].radius + reduced[1].radius <= *opt.periodic_L / 2.0)
        return mc::MCEstimate::exact(
            two_ball_overlap(reduced[0].radius, reduced[1].radius, s), opt.seed);
    }
  }

  std::size_t smallest = 0;
  for (std::size_t i = 1; i < reduced.size(); ++i)
    if (reduced[i].radius < reduced[smallest].radius) smallest = i;
  const BallSpec& host = reduced[smallest];
  const double host_volume = ball_volume(host.radius, d);

  auto est = mc::sample_mean(opt.samples, opt.seed, opt.workers,
                             [&, buf = std::vector<double>()](mc::Rng& rng) mutable {
    detail::sample_in_ball(rng, host.center, host.radius, buf);
    for (std::size_t i = 0; i < reduced.size(); ++i) {
      if (i == smallest) continue;
      if (!detail::inside_ball(buf, reduced[i], opt.periodic_L)) return 0.0;
    }
    return 1.0;
  });

  // Binomial error model on the hit fraction.
  const double p = est.value;
  const double se =
      std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(opt.samples));
  return {host_volume * p, host_volume * se, opt.samples, opt.seed};
}

}  // namespace renact::geometry
