#pragma once

#include <kolmo/kfp_checks.hpp>

#include <vector>

namespace kolmo {

struct PoincareReport {
  double lhs = 0.0;        // L2 size of the truncated part over the unit cylinder
  double grad_norm = 0.0;  // velocity gradient L2 over the extended box
  double dual_norm = 0.0;  // transport derivative in the mixed dual norm
  double rhs = 0.0;        // grad_norm + dual_norm
  double theta = 0.0;      // truncation level actually used, as a fraction of M
  double zero_fraction = 0.0;  // share of the vanishing box where the cut is zero
  double cp = 0.0;             // smallest lhs / rhs over the admissible sweep
};

// Truncation inequality on the unit cylinder: the part of u above a level
// theta M is controlled by the gradient and transport norms on the extended
// box, provided the cut vanishes on at least a quarter of the vanishing box.
// Levels below the quarter quantile of u/M on that box are lifted to it, so
// the vanishing condition is enforced by construction; if no level in the
// sweep stays below 0.95 after the lift the precondition is unattainable and
// a domain error is thrown.
PoincareReport weak_poincare_check(const GridField& u, const HarnackGeometry& geom,
                                   const std::vector<double>& theta_grid = {},
                                   int n_points = 4096);

// One checkerboard-coefficient solve pair feeding every inequality check:
// a tight domain holding the unit cylinder for the local estimates and an
// extended domain holding the enlarged Poincare box.
struct BatterySettings {
  int ns = 128;             // spatial nodes per axis; time slices run at 2 ns
  double lambda = 0.1;      // low diffusion tile
  double Lambda = 1.0;      // high diffusion tile
  double cell = 0.25;       // checkerboard period
  int lattice_points = 4096;
  unsigned seed = 1;        // picks bump layout and checkerboard phase
};

struct BatteryChecks {
  double moser = 0.0;
  double harnack = 0.0;
  double weak_harnack = 0.0;
  double holder_alpha = 0.0;
  double poincare_cp = 0.0;
};

struct BatteryRunReport {
  BatteryChecks base;
  BatteryChecks refined;
  BatteryChecks drift;  // relative change per check between the two grids
};

// Reduces already solved fields; tight covers the unit cylinder, ext the
// enlarged box.
BatteryChecks inequality_checks(const GridField& tight, const GridField& ext,
                                const BatterySettings& s);

// Solves the two domains at the given spatial resolution and reduces them.
// The random geometry depends only on the seed, so calls at different
// resolutions see the same coefficients and data.
BatteryChecks battery_checks_at(const BatterySettings& s, int ns);

// Solves at the base resolution and once more at double resolution, then
// reduces both through the same fixed lattices.
BatteryRunReport battery_run(const BatterySettings& s);

}  // namespace kolmo
