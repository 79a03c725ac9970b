#pragma once

#include <kolmo/group.hpp>

#include <cstdint>

namespace kolmo {

// Slanted cylinder: the group translate by `center` of the dilated unit
// cylinder B_1 x ... x B_1 x (-1, 0] (one Euclidean ball per block).
struct Cylinder {
  GroupPoint center;
  double r = 1.0;
};

// Membership via the round trip zeta = delta_{1/r}(center^{-1} o z).
bool cylinder_contains(const LieStructure& S, const Cylinder& c, const GroupPoint& z);

// Product of unit-ball volumes over the blocks (unit time height).
double unit_cylinder_measure(const LieStructure& S);

// Exact Lebesgue measure r^{Q+2} |Q_1|: translations are measure preserving
// (det E(s) = 1) and dilations scale by r^{Q+2}.
double cylinder_measure(const LieStructure& S, double r);

struct CylinderMeasureCheck {
  double mc_estimate = 0.0;
  double exact = 0.0;
  double rel_error = 0.0;
  std::int64_t n_samples = 0;
};

// Monte Carlo volume of the slanted cylinder from membership sampling over a
// bounding box; agrees with the exact scaling at MC accuracy.
CylinderMeasureCheck cylinder_measure_mc(const LieStructure& S, const Cylinder& c,
                                         std::int64_t n_samples, std::uint64_t seed);

struct NestingEstimate {
  double c_tilde = 0.0;   // largest sampled c with z o Q_{c(r-rho)} inside Q_r
  double r = 0.0, rho = 0.0;
  std::int64_t violations = 0;
};

// Empirical nesting constant for origin-centered cylinders: for sampled
// z in Q_rho and w in Q_{c(r-rho)}, requires z o w in Q_r.
NestingEstimate cylinder_nesting_estimate(const LieStructure& S, double r, double rho,
                                          std::int64_t n_samples, std::uint64_t seed);

struct SandwichEstimate {
  double c_bar = 1.0;        // max(outer, inner) structure constant
  double outer = 1.0;        // smallest c with Q_r(z0) inside the c r ball product
  double inner = 1.0;        // smallest c with the r/c ball product inside Q_r(z0)
};

// Ball-product sandwich constant of a slanted cylinder around its center
// coordinates, estimated by membership sampling.
SandwichEstimate cylinder_sandwich_estimate(const LieStructure& S, const Cylinder& c,
                                            std::int64_t n_samples, std::uint64_t seed);

}  // namespace kolmo
