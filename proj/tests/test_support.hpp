#pragma once

// Shared helpers for the test suite.

#include <catch2/catch_amalgamated.hpp>

#include "renact/mc.hpp"
#include "renact/model.hpp"

namespace test_support {

using renact::model::MixtureParams;
using renact::model::Vec3;

inline MixtureParams penetrable_free(double zr = 0.1, double zR = 0.0) {
  MixtureParams p;
  p.R = 1.0;
  p.r = 0.1;
  p.zr = zr;
  p.zR = zR;
  p.model = renact::model::ModelKind::penetrable;
  p.box = {24.0, renact::geometry::Boundary::free_space, 3};
  return p;
}

inline MixtureParams colloid_free(double zr = 0.1, double zR = 0.0) {
  MixtureParams p = penetrable_free(zr, zR);
  p.model = renact::model::ModelKind::colloid;
  return p;
}

inline Vec3 box_center(const MixtureParams& p) {
  const double c = p.box.side / 2.0;
  return {c, c, c};
}

inline Vec3 random_in_ball(renact::mc::Rng& rng, const Vec3& center, double radius) {
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

}  // namespace test_support
