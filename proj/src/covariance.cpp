#include <kolmo/covariance.hpp>
#include <kolmo/group.hpp>

#include <cmath>
#include <stdexcept>

namespace kolmo {

void check_diffusion_block(const Eigen::MatrixXd& A0, int m0) {
  if (A0.rows() != m0 || A0.cols() != m0)
    throw std::invalid_argument("diffusion block must be m0 x m0");
  if ((A0 - A0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + A0.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("diffusion block must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A0);
  if (es.eigenvalues()(0) <= 0.0)
    throw std::invalid_argument("diffusion block must be positive definite");
}

namespace {

void check_a0(const LieStructure& S, const Eigen::MatrixXd& A0) {
  check_diffusion_block(A0, S.m0());
}

Eigen::MatrixXd padded(const LieStructure& S, const Eigen::MatrixXd& A0) {
  Eigen::MatrixXd Abar = Eigen::MatrixXd::Zero(S.N(), S.N());
  Abar.topLeftCorner(S.m0(), S.m0()) = A0;
  return Abar;
}

}  // namespace

CovariancePoly::CovariancePoly(const LieStructure& S, const Eigen::MatrixXd& A0) : N_(S.N()) {
  check_a0(S, A0);
  const Eigen::MatrixXd Abar = padded(S, A0);
  // M[k] = (-B)^k / k!, the s^k coefficient of E(s).
  std::vector<Eigen::MatrixXd> M(S.kappa() + 1);
  M[0] = Eigen::MatrixXd::Identity(N_, N_);
  for (int k = 1; k <= S.kappa(); ++k) M[k] = (-1.0 / k) * (S.B() * M[k - 1]);
  P_.assign(2 * S.kappa() + 1, Eigen::MatrixXd::Zero(N_, N_));
  for (int k = 0; k <= S.kappa(); ++k)
    for (int l = 0; l <= S.kappa(); ++l)
      P_[k + l] += M[k] * Abar * M[l].transpose();
}

Eigen::MatrixXd CovariancePoly::eval(double t) const {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N_, N_);
  double tp = t;
  for (std::size_t d = 0; d < P_.size(); ++d) {
    C += (tp / static_cast<double>(d + 1)) * P_[d];
    tp *= t;
  }
  return C;
}

Eigen::MatrixXd covariance(const LieStructure& S, const Eigen::MatrixXd& A0, double t) {
  if (!(t > 0.0)) throw std::domain_error("covariance requires t > 0");
  return CovariancePoly(S, A0).eval(t);
}

HypoellipticityReport hypoellipticity_check(const LieStructure& S, const Eigen::MatrixXd& A0) {
  check_a0(S, A0);
  HypoellipticityReport rep;
  rep.N = S.N();
  const CovariancePoly poly(S, A0);
  rep.hypoelliptic = true;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (double t : {1e-3, 1e-2, 1e-1, 1.0}) {
    const Eigen::MatrixXd C = poly.eval(t);
    // Jacobi equilibration before the eigenvalue test: anisotropic dilation
    // scaling spreads the diagonal over dozens of orders of magnitude for
    // deep structures, and the raw spectrum underflows the threshold even
    // though C is positive definite.
    Eigen::VectorXd d = C.diagonal().cwiseMax(0.0).cwiseSqrt();
    if ((d.array() <= 0.0).any()) {
      rep.hypoelliptic = false;
      rep.min_eigenvalue = 0.0;
      rep.min_eigenvalue_at = t;
      continue;
    }
    const Eigen::MatrixXd Cs = d.cwiseInverse().asDiagonal() * C * d.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Cs);
    const double lam = es.eigenvalues()(0);
    if (lam <= 1e-12 * Cs.cwiseAbs().maxCoeff()) rep.hypoelliptic = false;
    if (lam < rep.min_eigenvalue) {
      rep.min_eigenvalue = lam;
      rep.min_eigenvalue_at = t;
    }
  }
  // Controllability block matrix [A0bar^{1/2}, B A0bar^{1/2}, ...].
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A0);
  Eigen::MatrixXd root = es.operatorSqrt();
  Eigen::MatrixXd col = Eigen::MatrixXd::Zero(S.N(), S.m0());
  col.topRows(S.m0()) = root;
  Eigen::MatrixXd K(S.N(), S.N() * S.m0());
  for (int k = 0; k < S.N(); ++k) {
    K.middleCols(k * S.m0(), S.m0()) = col;
    col = S.B() * col;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
  const auto& sv = svd.singularValues();
  rep.kalman_rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rep.kalman_rank;
  return rep;
}

}  // namespace kolmo
