#pragma once

#include <kolmo/group.hpp>

#include <functional>

namespace kolmo {

using SpacetimeFn = std::function<double(const GroupPoint&)>;

// Finite-difference evaluation of the constant-coefficient principal operator
//   sum_{i,j<m0} a0_ij d_ij u + drift_sign * <B x, D u> - d_t u
// at a smooth closure: centered second differences on the diffusive block,
// one-sided three-point differences against the drift direction, one-sided
// three-point forward difference in time. Every term is O(h^2) accurate.
inline double principal_fd(const LieStructure& S, const Eigen::MatrixXd& A0,
                           const SpacetimeFn& u, const GroupPoint& z, double h,
                           double drift_sign = 1.0) {
  const auto shifted = [&](int i, double di, int j, double dj, double dt) {
    GroupPoint w = z;
    if (i >= 0) w.x(i) += di;
    if (j >= 0) w.x(j) += dj;
    w.t += dt;
    return u(w);
  };
  const double u0 = u(z);
  double acc = 0.0;
  const int m0 = S.m0();
  for (int i = 0; i < m0; ++i) {
    acc += A0(i, i) * (shifted(i, h, -1, 0, 0) - 2.0 * u0 + shifted(i, -h, -1, 0, 0)) / (h * h);
    for (int j = i + 1; j < m0; ++j) {
      const double cross = (shifted(i, h, j, h, 0) - shifted(i, h, j, -h, 0) -
                            shifted(i, -h, j, h, 0) + shifted(i, -h, j, -h, 0)) /
                           (4.0 * h * h);
      acc += 2.0 * A0(i, j) * cross;
    }
  }
  const Eigen::VectorXd w = drift_sign * (S.B() * z.x);
  for (int i = 0; i < S.N(); ++i) {
    if (w(i) == 0.0) continue;
    const double s = w(i) > 0.0 ? h : -h;
    acc += w(i) * (3.0 * u0 - 4.0 * shifted(i, -s, -1, 0, 0) + shifted(i, -2.0 * s, -1, 0, 0)) /
           (2.0 * s);
  }
  acc -= (-3.0 * u0 + 4.0 * shifted(-1, 0, -1, 0, h) - shifted(-1, 0, -1, 0, 2.0 * h)) / (2.0 * h);
  return acc;
}

}  // namespace kolmo
