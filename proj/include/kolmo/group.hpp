#pragma once

#include <kolmo/structure.hpp>

#include <stdexcept>

namespace kolmo {

// Space-time point (x, t) with x in R^N.
struct GroupPoint {
  Eigen::VectorXd x;
  double t = 0.0;

  GroupPoint() = default;
  GroupPoint(Eigen::VectorXd x_, double t_) : x(std::move(x_)), t(t_) {}
};

// E(s) = exp(-s B) as the exact finite sum; B is nilpotent of index kappa+1.
inline Eigen::MatrixXd exp_group(const LieStructure& S, double s) {
  const int N = S.N();
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(N, N);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(N, N);
  for (int k = 1; k <= S.kappa(); ++k) {
    term = (-s / k) * (S.B() * term);
    E += term;
  }
  return E;
}

// Group product: the left translation by zeta maps z to compose(S, zeta, z).
inline GroupPoint compose(const LieStructure& S, const GroupPoint& zeta, const GroupPoint& z) {
  return {z.x + exp_group(S, z.t) * zeta.x, zeta.t + z.t};
}

inline GroupPoint inverse(const LieStructure& S, const GroupPoint& z) {
  return {-(exp_group(S, -z.t) * z.x), -z.t};
}

// Anisotropic dilation: block j scales by r^{2j+1}, time by r^2.
inline GroupPoint dilate(const LieStructure& S, double r, const GroupPoint& z) {
  if (!(r > 0.0)) throw std::domain_error("dilation factor must be positive");
  Eigen::VectorXd y(S.N());
  for (int i = 0; i < S.N(); ++i) y(i) = std::pow(r, S.alpha()(i)) * z.x(i);
  return {std::move(y), r * r * z.t};
}

// Composition law matching the opposite transport orientation d_t + v.grad_x,
// on points (v, x, t) with v, x in R^n stacked as the spatial vector.
inline GroupPoint compose_kinetic_alt(const GroupPoint& zeta, const GroupPoint& z) {
  const Eigen::Index n = zeta.x.size() / 2;
  if (zeta.x.size() != 2 * n || z.x.size() != zeta.x.size())
    throw std::invalid_argument("kinetic points need matching even spatial dimension");
  Eigen::VectorXd y(2 * n);
  y.head(n) = zeta.x.head(n) + z.x.head(n);
  y.tail(n) = zeta.x.tail(n) + z.x.tail(n) + z.t * zeta.x.head(n);
  return {std::move(y), zeta.t + z.t};
}

inline GroupPoint inverse_kinetic_alt(const GroupPoint& z) {
  const Eigen::Index n = z.x.size() / 2;
  if (z.x.size() != 2 * n)
    throw std::invalid_argument("kinetic points need even spatial dimension");
  Eigen::VectorXd y(2 * n);
  y.head(n) = -z.x.head(n);
  y.tail(n) = -z.x.tail(n) + z.t * z.x.head(n);
  return {std::move(y), -z.t};
}

}  // namespace kolmo
