#pragma once

#include <kolmo/structure.hpp>

#include <vector>

namespace kolmo {

// C(t) = int_0^t E(s) A0bar E(s)^T ds where A0bar is A0 zero-padded to N x N.
// The integrand has polynomial entries of degree <= 2 kappa, so the integral
// is evaluated exactly from cached matrix coefficients:
//   C(t) = sum_{d=0}^{2 kappa} t^{d+1} / (d+1) * P[d].
class CovariancePoly {
 public:
  CovariancePoly() = default;
  CovariancePoly(const LieStructure& S, const Eigen::MatrixXd& A0);
  Eigen::MatrixXd eval(double t) const;
  const std::vector<Eigen::MatrixXd>& coefficients() const { return P_; }

 private:
  std::vector<Eigen::MatrixXd> P_;
  int N_ = 0;
};

// Validates A0 (symmetric positive definite on the first block) and returns
// C(t). Throws std::invalid_argument on bad A0, std::domain_error for t <= 0.
Eigen::MatrixXd covariance(const LieStructure& S, const Eigen::MatrixXd& A0, double t);

// Rejects diffusion blocks that are not square symmetric positive definite of
// the stated size.
void check_diffusion_block(const Eigen::MatrixXd& A0, int m0);

struct HypoellipticityReport {
  bool hypoelliptic = false;
  // Smallest eigenvalue of the Jacobi-equilibrated covariance over the
  // checked times (the raw spectrum underflows for deep structures).
  double min_eigenvalue = 0.0;
  double min_eigenvalue_at = 0.0;
  int kalman_rank = 0;
  int N = 0;
};

// C(t) must be positive definite at t in {1e-3, 1e-2, 1e-1, 1}, tested on the
// diagonally equilibrated matrix against a 1e-12 relative threshold; the
// report also carries the controllability rank of
// [A0bar^{1/2}, B A0bar^{1/2}, ..., B^{N-1} A0bar^{1/2}] at relative
// tolerance 1e-10.
HypoellipticityReport hypoellipticity_check(const LieStructure& S, const Eigen::MatrixXd& A0);

}  // namespace kolmo
