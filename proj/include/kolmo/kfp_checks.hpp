#pragma once

#include <kolmo/fields.hpp>
#include <kolmo/structure.hpp>

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace kolmo {

// Axis aligned box in (v, x, t) hanging below its top face. The cylinder
// factory applies the kinetic scaling: radius r stretches to r in velocity,
// r cubed in position and r squared backwards in time.
struct KineticBox {
  Eigen::Vector3d top{0.0, 0.0, 0.0};
  double rv = 1.0, rx = 1.0, depth = 1.0;

  static KineticBox cylinder(const Eigen::Vector3d& top, double r);
  double measure() const { return 4.0 * rv * rx * depth; }
  bool contains(double v, double x, double t) const;
};

// Deterministic low discrepancy lattice filling the box. The points depend
// only on the box, never on the grid, so reductions computed on two
// refinements of the same solve differ only through the field values.
std::vector<Eigen::Vector3d> box_lattice(const KineticBox& box, int n_points);

struct BoxReduce {
  double sup, inf, mean;
};

// Reduces transform(u) over the box, combining the lattice with the grid
// nodes that fall inside so sharp nodal extrema are not missed.
BoxReduce box_reduce(const GridField& u, const KineticBox& box, int n_points,
                     const std::function<double(double)>& transform = {});

struct MoserReport {
  double sup_small = 0.0;  // sup of (u + f_norm)^p over the inner cylinder
  double norm_big = 0.0;   // L^beta norm of the same power over the outer one
  double ratio = 0.0;      // sup_small (r-rho)^{(Q+2)/beta} / norm_big
};

// Local boundedness ratio on nested kinetic cylinders with shared top center.
// q is the source integrability exponent, beta its conjugate.
MoserReport moser_check(const GridField& u, const Eigen::Vector3d& top, double rho,
                        double r, double p, double q, double f_norm, int n_points);

// Box family for the Harnack and weak Poincare geometry on the unit cylinder.
struct HarnackGeometry {
  double omega = 0.7;
  double rho = 0.45;
  double eta = 0.5;
  double R = 1.25;

  KineticBox plus() const;         // late cylinder ending at the top time
  KineticBox minus_tilde() const;  // early cylinder for the pointwise sup
  KineticBox minus_weak() const;   // early cylinder for the integral mean
  KineticBox zero_box() const;     // where the truncation must vanish
  KineticBox ext_box() const;      // enlarged box carrying the gradient norms
  KineticBox unit() const;
};

void validate(const HarnackGeometry& geom);

struct HarnackReport {
  double numerator = 0.0;  // sup or integral mean over the early box
  double inf_plus = 0.0;
  double ratio = 0.0;
  bool unbounded = false;  // vanishing denominator, ratio not meaningful
};

HarnackReport harnack_ratio(const GridField& u, const HarnackGeometry& geom,
                            double f_norm, int n_points);

// Integral mean variant with exponent p over the early box.
HarnackReport weak_harnack_ratio(const GridField& u, const HarnackGeometry& geom,
                                 double p, double f_norm, int n_points);

struct ChainLink {
  double constant = 1.0;   // value ratio clipped below at one
  bool admissible = false; // a scaled cylinder pair realizes the geometry
  bool broken = false;     // earlier value vanished
};

// Pointwise constants along a chain of points, with a geometric test that a
// dilated copy of the Harnack boxes connects each consecutive pair.
std::vector<ChainLink> harnack_chain(const GridField& u, const LieStructure& S,
                                     const std::vector<Eigen::Vector3d>& points,
                                     const HarnackGeometry& geom);

struct HolderReport {
  std::vector<double> radii;
  std::vector<double> oscillations;
  double alpha = 1.0;     // fitted oscillation decay exponent, clamped to (0,1]
  double seminorm = 0.0;  // largest osc / r^alpha over the fitted levels
  double fitted_c = 0.0;  // seminorm relative to the solution and source size
};

// Oscillation decay over dyadic sub cylinders shrinking toward the top
// center. Needs at least three levels the grid can resolve.
HolderReport holder_estimate(const GridField& u, const Eigen::Vector3d& top,
                             double r_hi, int levels, double f_norm, int n_points);

// Dual Sobolev norm of a velocity profile with zero boundary extension,
// through the tridiagonal solve of (-d_vv + 1) w = g.
double dual_norm_velocity(const Eigen::VectorXd& g, double h);

// L2 over the box's (x, t) section of the velocity dual norm of the
// transport derivative v du/dx - du/dt, differenced one sided in time and
// upwind in position.
double transport_dual_norm(const GridField& u, const KineticBox& box);

// Plain L2 norm of du/dv over the box.
double velocity_gradient_norm(const GridField& u, const KineticBox& box);

struct VelocityMoments {
  double mass = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  bool clipped = false;  // negative values were skipped inside the log
};

// Velocity section moments of a field with axes (v, x, t) at fixed node
// indices in position and time.
VelocityMoments moments(const GridField& u, int ix, int it);

}  // namespace kolmo
