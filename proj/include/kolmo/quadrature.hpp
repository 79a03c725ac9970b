#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kolmo {

// One dimensional quadrature rule. Legendre rules live on (-1, 1); Hermite
// rules integrate against the standard normal density on the whole line, with
// weights summing to one.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline QuadRule gauss_legendre_rule(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  QuadRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// Probabilists' Hermite rule from the symmetric tridiagonal Jacobi matrix.
inline QuadRule gauss_hermite_rule(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be positive");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = v0 * v0;
  }
  return r;
}

// Maps a rule on (-1, 1) to the interval (a, b).
inline QuadRule map_rule(const QuadRule& base, double a, double b) {
  QuadRule r = base;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = mid + half * base.nodes[i];
    r.weights[i] = half * base.weights[i];
  }
  return r;
}

}  // namespace kolmo
