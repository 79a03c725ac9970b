#pragma once

#include <Eigen/Dense>

namespace kolmo {

// Point of the relativistic kinetic phase space: momentum, position and
// coordinate time.
struct RelPoint {
  Eigen::VectorXd p;
  Eigen::VectorXd x;
  double t = 0.0;
};

// Energy factor of a momentum on the unit mass shell.
double lorentz_gamma(const Eigen::VectorXd& p);

// Spatial part of the boost mapping the rest frame to the frame moving with
// momentum p. Satisfies sigma sigma^T = I + p p^T exactly.
Eigen::MatrixXd relativistic_sigma(const Eigen::VectorXd& p);

// Boost composition law on momentum, position and time. The first argument's
// boost acts on the second argument's coordinates. In one space dimension
// this is a group law; in higher dimension two boosts compose to a boost
// times a rotation, so the family has exact identity and two sided inverse
// but is not associative.
RelPoint compose_lorentz(const RelPoint& a, const RelPoint& b);

// Closed form two sided inverse for the boost composition.
RelPoint inverse_lorentz(const RelPoint& a);

}  // namespace kolmo
