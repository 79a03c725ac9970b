#pragma once

#include <kolmo/group.hpp>

#include <cmath>
#include <stdexcept>

namespace kolmo {

// |t|^{1/2} + sum_i |x_i|^{1/alpha_i}; equivalent to the level-set norm and
// cheap enough to seed its bracket.
inline double norm1(const LieStructure& S, const GroupPoint& z) {
  double v = std::sqrt(std::abs(z.t));
  for (int i = 0; i < S.N(); ++i)
    v += std::pow(std::abs(z.x(i)), 1.0 / S.alpha()(i));
  return v;
}

// Homogeneous norm: the unique r > 0 with
//   sum_i x_i^2 / r^{2 alpha_i} + t^2 / r^4 = 1,
// located by bisection to 1e-12 relative width; exactly 1-homogeneous under
// the anisotropic dilations.
inline double homogeneous_norm(const LieStructure& S, const GroupPoint& z) {
  const double seed = norm1(S, z);
  if (seed == 0.0) return 0.0;
  const auto level = [&](double r) {
    double s = z.t * z.t / std::pow(r, 4);
    for (int i = 0; i < S.N(); ++i)
      s += z.x(i) * z.x(i) / std::pow(r, 2.0 * S.alpha()(i));
    return s;
  };
  double lo = 1e-8 * seed, hi = 1e8 * seed;
  // The level function is strictly decreasing; widen defensively if the
  // declared bracket ever fails to straddle 1.
  int guard = 0;
  while (level(lo) < 1.0 && guard++ < 60) lo *= 0.5;
  guard = 0;
  while (level(hi) > 1.0 && guard++ < 60) hi *= 2.0;
  if (level(lo) < 1.0 || level(hi) > 1.0)
    throw std::runtime_error("homogeneous norm bracket failure");
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (level(mid) >= 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Left-invariant quasi-distance d(z, w) = |z^{-1} o w|.
inline double distance(const LieStructure& S, const GroupPoint& z, const GroupPoint& w) {
  return homogeneous_norm(S, compose(S, inverse(S, z), w));
}

}  // namespace kolmo
