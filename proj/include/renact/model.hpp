#pragma once

// The two concrete binary sphere mixtures and their pointwise interactions:
// Mayer f-functions, the chain interaction zeta, and the corona surrogate
// zeta_tilde. Both models are hard-core, so f and zeta take values in {-1,0}.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "renact/geometry.hpp"

namespace renact::model {

using Vec3 = std::array<double, 3>;

enum class SpeciesKind { large, small };

/// penetrable: small spheres ideal among themselves (Asakura-Oosawa);
/// colloid: both species mutually hard.
enum class ModelKind { penetrable, colloid };

struct MixtureParams {
  int d = 3;
  double R = 1.0;   // large radius
  double r = 0.1;   // small radius
  double zR = 0.0;  // large activity (per volume)
  double zr = 0.0;  // small activity (per volume)
  ModelKind model = ModelKind::penetrable;
  geometry::BoxSpec box{6.0, geometry::Boundary::periodic, 3};
  /// Test hook: colloid model with the small-small interaction switched off.
  /// Cloud terms of size >= 2 then vanish identically and every effective
  /// quantity must reproduce its penetrable counterpart.
  bool force_ideal_solvent = false;

  void validate() const {
    if (d != 3)
      throw std::invalid_argument("MixtureParams: model operations require d == 3");
    if (!(R > r && r > 0.0))
      throw std::invalid_argument("MixtureParams: need R > r > 0");
    if (!std::isfinite(zR) || !std::isfinite(zr))
      throw std::invalid_argument("MixtureParams: activities must be finite");
    box.validate();
    if (box.boundary == geometry::Boundary::periodic && box.side <= 2.0 * (R + r))
      throw std::invalid_argument("MixtureParams: periodic box needs L > 2(R+r)");
  }

  bool periodic() const { return box.boundary == geometry::Boundary::periodic; }

  bool ideal_solvent() const {
    return model == ModelKind::penetrable || force_ideal_solvent;
  }

  double distance(const Vec3& a, const Vec3& b) const {
    if (periodic()) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double d0 = geometry::periodic_axis_delta(a[i] - b[i], box.side);
        s += d0 * d0;
      }
      return std::sqrt(s);
    }
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }

  /// Hard-core diameter for a species pair; negative means no exclusion.
  double exclusion_range(SpeciesKind a, SpeciesKind b) const {
    if (a == SpeciesKind::large && b == SpeciesKind::large) return 2.0 * R;
    if (a == SpeciesKind::small && b == SpeciesKind::small)
      return ideal_solvent() ? -1.0 : 2.0 * r;
    return R + r;
  }

  Vec3 wrap(Vec3 p) const {
    if (!periodic()) return p;
    for (double& c : p) {
      c = std::fmod(c, box.side);
      if (c < 0.0) c += box.side;
    }
    return p;
  }
};

/// A chain/cloud of small-sphere centers (y_1, ..., y_k), k >= 1.
struct Cloud {
  std::vector<Vec3> points;

  void validate() const {
    if (points.empty()) throw std::invalid_argument("Cloud: needs k >= 1 points");
  }
  int size() const { return static_cast<int>(points.size()); }
};

/// Pinned large-sphere centers plus integrated-over clouds: the argument list
/// of the modified Ursell function.
struct Configuration {
  std::vector<Vec3> large;
  std::vector<Cloud> clouds;
};

/// Mayer f-function: -1 inside the hard core, 0 outside. Closed exclusion
/// (distance exactly at the core boundary is allowed).
inline double mayer_f(const Vec3& p1, SpeciesKind s1, const Vec3& p2,
                      SpeciesKind s2, const MixtureParams& params) {
  const double range = params.exclusion_range(s1, s2);
  if (range <= 0.0) return 0.0;
  return params.distance(p1, p2) < range ? -1.0 : 0.0;
}

/// zeta(x, Y) = prod_j (1 + f(x, y_j)) - 1: -1 iff some cloud point lies in
/// the exclusion ball B(x, R+r), else 0.
inline double zeta(const Vec3& x, const Cloud& cloud, const MixtureParams& params) {
  cloud.validate();
  const double range = params.R + params.r;
  for (const Vec3& y : cloud.points)
    if (params.distance(x, y) < range) return -1.0;
  return 0.0;
}

/// Corona surrogate: -1 iff some cloud point lies in the depletion shell
/// R - r < dist < R + r. Smaller in absolute value than zeta, which is what
/// the improved convergence conditions exploit.
inline double zeta_tilde(const Vec3& x, const Cloud& cloud,
                         const MixtureParams& params) {
  cloud.validate();
  const double lo = params.R - params.r, hi = params.R + params.r;
  for (const Vec3& y : cloud.points) {
    const double s = params.distance(x, y);
    if (s > lo && s < hi) return -1.0;
  }
  return 0.0;
}

/// Whether the 2r-overlap graph of the cloud is connected. For the colloid
/// model, clouds violating this are a nu-null set and get weight zero.
inline bool cloud_overlap_connected(const Cloud& cloud, const MixtureParams& params) {
  cloud.validate();
  const int k = cloud.size();
  if (k == 1) return true;
  std::vector<char> seen(k, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  const double range = 2.0 * params.r;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < k; ++w)
      if (!seen[w] && params.distance(cloud.points[v], cloud.points[w]) < range) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  return reached == k;
}

}  // namespace renact::model
