#pragma once

// Deterministic quadrature reference paths: adaptive Simpson in 1D, a grid
// counter for k-ball intersections, and the radial closed-form routes for the
// penetrable pair coefficient b_2 and its z_r derivative. These are kept
// independent of the Monte Carlo estimators they validate.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "renact/geometry.hpp"
#include "renact/model.hpp"

namespace renact::quadrature {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40) {
  if (!(b >= a)) throw std::invalid_argument("integrate: need b >= a");
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = detail::simpson(f, a, b, fa, fm, fb);
  return detail::adaptive_step(f, a, b, fa, fm, fb, whole,
                               tol * std::max(1.0, std::abs(whole)), max_depth);
}

/// Deterministic grid count of |B_1 cap ... cap B_k| over the intersection of
/// the balls' bounding boxes, cell centers at resolution h (d = 3 only).
inline double grid_intersection_volume(const std::vector<geometry::BallSpec>& balls,
                                       double h) {
  if (balls.empty())
    throw std::invalid_argument("grid_intersection_volume: empty ball list");
  if (h <= 0.0) throw std::invalid_argument("grid_intersection_volume: h > 0");
  for (const auto& b : balls) {
    b.validate();
    if (b.dim() != 3)
      throw std::invalid_argument("grid_intersection_volume: d = 3 only");
  }
  double lo[3], hi[3];
  for (int c = 0; c < 3; ++c) {
    lo[c] = -1e300;
    hi[c] = 1e300;
    for (const auto& b : balls) {
      lo[c] = std::max(lo[c], b.center[c] - b.radius);
      hi[c] = std::min(hi[c], b.center[c] + b.radius);
    }
    if (lo[c] >= hi[c]) return 0.0;
  }
  std::uint64_t hits = 0;
  const auto cells = [&](int c) {
    return static_cast<long>(std::ceil((hi[c] - lo[c]) / h));
  };
  const long nx = cells(0), ny = cells(1), nz = cells(2);
  std::vector<double> r2(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) r2[i] = balls[i].radius * balls[i].radius;
  for (long ix = 0; ix < nx; ++ix) {
    const double x = lo[0] + (ix + 0.5) * h;
    for (long iy = 0; iy < ny; ++iy) {
      const double y = lo[1] + (iy + 0.5) * h;
      for (long iz = 0; iz < nz; ++iz) {
        const double z = lo[2] + (iz + 0.5) * h;
        bool in = true;
        for (std::size_t i = 0; i < balls.size() && in; ++i) {
          const double dx = x - balls[i].center[0], dy = y - balls[i].center[1],
                       dz = z - balls[i].center[2];
          in = dx * dx + dy * dy + dz * dz < r2[i];
        }
        if (in) ++hits;
      }
    }
  }
  return static_cast<double>(hits) * h * h * h;
}

/// Penetrable b_2(z_r) by 1D radial quadrature:
///   b_2 = -|B(0,2R)|/2 + (1/2) int_{2R}^{2(R+r)} (e^{z_r V_lens(s)} - 1) 4 pi s^2 ds,
/// where V_lens(s) is the overlap of the two exclusion balls of radius R + r.
inline double b2_penetrable(const model::MixtureParams& params, double tol = 1e-12) {
  if (params.model != model::ModelKind::penetrable && !params.force_ideal_solvent)
    throw std::invalid_argument("b2_penetrable: penetrable model required");
  const double R = params.R, r = params.r, zr = params.zr;
  const double hard = -0.5 * geometry::ball_volume(2.0 * R);
  const auto integrand = [&](double s) {
    const double lens = geometry::lens_volume(R + r, s);
    return std::expm1(zr * lens) * 4.0 * std::numbers::pi * s * s;
  };
  return hard + 0.5 * integrate(integrand, 2.0 * R, 2.0 * (R + r), tol);
}

/// d b_2 / d z_r by the same radial route:
///   (1/2) int_{2R}^{2(R+r)} V_lens(s) e^{z_r V_lens(s)} 4 pi s^2 ds  (positive).
inline double db2_dzr_penetrable(const model::MixtureParams& params,
                                 double tol = 1e-12) {
  if (params.model != model::ModelKind::penetrable && !params.force_ideal_solvent)
    throw std::invalid_argument("db2_dzr_penetrable: penetrable model required");
  const double R = params.R, r = params.r, zr = params.zr;
  const auto integrand = [&](double s) {
    const double lens = geometry::lens_volume(R + r, s);
    return lens * std::exp(zr * lens) * 4.0 * std::numbers::pi * s * s;
  };
  return 0.5 * integrate(integrand, 2.0 * R, 2.0 * (R + r), tol);
}

}  // namespace renact::quadrature
