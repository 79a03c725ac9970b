#pragma once

#include <kolmo/kfp.hpp>

#include <Eigen/Dense>

namespace kolmo {

// Faces of the space-time box that carry data for the forward marched
// kinetic operator: the velocity edges at every time, the slice the march
// starts from, and each position edge restricted to the rows whose
// transport speed points into the domain. The remaining position-edge rows
// are outflow; the one-sided upwind stencil reaches them, so they evolve
// with the interior instead of holding data.
struct KolmogorovFaces {
  bool velocity_edges = true;
  bool initial_slice = true;
  bool position_inflow_only = true;
};

// Lower obstacle problem for
//   du/dt = d_v(a d_v u) + v d_x u - rate*u - f,   u >= psi,
// marched forward from g on the earliest slice with g held on the carrying
// faces. The constraint enters through a penalization term of strength
// 1/eps whose eps follows a halving ladder; every rung reruns the march.
// The penalty update is implicit in the penalty term alone, so the ladder
// never tightens the stable step. With project set, each step additionally
// lifts the field onto the obstacle pointwise.
struct ObstacleProblem {
  Axis v, x, t;        // t.n counts recorded slices including the initial one
  Coef2 a;             // diffusion, positive on velocity midpoints
  Boundary2 psi;       // obstacle over space-time
  Boundary2 g;         // data on the carrying faces and the initial slice
  Coef2 f;             // source, empty means zero
  double rate = 0.0;   // discounting extension, zero for the base contract
  double eps_start = 1e-1;
  double eps_floor = 1e-5;
  bool project = true;
  KolmogorovFaces faces;
};

struct ObstacleReport {
  // Largest |min(u - psi, -res)| seen across updated nodes and substeps of
  // the final rung, where res is the discrete equation residual; zero means
  // each node either satisfies the equation or sits on the obstacle with the
  // equation pushing down.
  double complementarity = 0.0;
  double domination_gap = 0.0;  // max(psi - u) over the returned slices
  long penalty_updates = 0;     // node updates the penalty modified
  long projection_lifts = 0;    // node updates the pointwise lift raised
  double final_epsilon = 0.0;
  int ladder_rungs = 0;
  int substeps = 0;             // internal steps of one rung's march
};

struct ObstacleSolution {
  GridField u;  // axes (v, x, t)
  ObstacleReport report;
};

ObstacleSolution solve_obstacle(const ObstacleProblem& ob);

// Quadratic defect 1/2 * integral of a*(du/dv - flux)^2 between the velocity
// gradient of u and a candidate flux. Flux values live on velocity midpoints
// and are stored at the lower node index; the last velocity row is ignored.
// The flux must satisfy the discrete constraint
//   d_v(a*flux) = f - (v du/dx - du/dt)
// on interior nodes, differenced the way the march differences them; a
// violation beyond tol throws. The defect vanishes exactly when flux is the
// velocity gradient of an unconstrained marched solution.
double energy_functional(const GridField& u, const GridField& flux,
                         const Coef2& a, const Coef2& f, double tol = 1e-6);

struct StabilityReport {
  double u_norm = 0.0;  // energy norm surrogate of the solution
  double g_norm = 0.0;  // same surrogate of the data extended over the box
  double f_norm = 0.0;  // sliced dual norm of the source
  double ratio = 0.0;   // u_norm / (g_norm + f_norm), zero over zero is zero
};

// Solves the problem and compares norm surrogates of the solution against
// the data, mirroring the a-priori bound behind well-posedness. The
// surrogate combines the L2 norm, the velocity gradient seminorm and the
// dual norm of the transport derivative over the full domain box.
StabilityReport stability_bound_check(const ObstacleProblem& ob, int n_points = 4096);

}  // namespace kolmo
