#pragma once

#include <kolmo/fields.hpp>

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace kolmo {

using Coef2 = std::function<double(double v, double x)>;
using Boundary2 = std::function<double(double v, double x, double t)>;

// Forward marched problem in one velocity and one space dimension,
//   du/dt = d_v(a d_v u) + v d_x u + b d_v u + c u - f,
// explicit Euler with conservative diffusion, velocity signed upwind
// transport, Dirichlet data on all four spatial edges and data on the
// earliest time slice.
struct KineticProblem {
  Axis v, x, t;        // t.n counts recorded slices including the initial one
  Coef2 a;             // diffusion, must stay positive on midpoints
  Coef2 b;             // velocity drift, empty means zero
  Coef2 c;             // reaction, empty means zero
  Coef2 f;             // source, empty means zero
  Coef2 initial;
  Boundary2 boundary;
};

struct MarchOptions {
  double forced_dt = 0.0;  // 0 lets the solver pick from the stability bound
  double safety = 0.9;
};

// Largest internal step the explicit scheme accepts, from the combined
// diffusion, transport, drift and reaction bound.
double stable_time_step(const KineticProblem& prob);

// Marches the problem and returns the recorded slices as a field with axes
// (v, x, t). Internal substeps align exactly with each recorded interval.
GridField march_kinetic(const KineticProblem& prob, const MarchOptions& opts = {});

// Dimension general variant sharing one scalar diffusion across the velocity
// axes. Axes run velocities first, then positions, then time; callbacks see
// the 2n spatial coordinates in that order.
using CoefN = std::function<double(const Eigen::VectorXd& vx)>;
using BoundaryN = std::function<double(const Eigen::VectorXd& vx, double t)>;

struct KineticProblemN {
  int n = 1;
  std::vector<Axis> axes;  // 2n spatial axes then the time axis
  CoefN a;
  CoefN c;
  CoefN f;
  CoefN initial;
  BoundaryN boundary;
};

double stable_time_step_general(const KineticProblemN& prob);
GridField march_kinetic_general(const KineticProblemN& prob, const MarchOptions& opts = {});

}  // namespace kolmo
