#pragma once

#include <kolmo/covariance.hpp>
#include <kolmo/group.hpp>

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace kolmo {

// Factorized data for one positive time separation, reusable across many
// spatial offsets at that separation.
struct GammaSlice {
  double tau = 0.0;
  Eigen::MatrixXd E;                       // drift propagator at tau
  Eigen::LDLT<Eigen::MatrixXd> C_solver;   // covariance factorization
  double log_norm = 0.0;                   // log of the Gaussian prefactor
};

// Closed form fundamental solution attached to a canonical structure and a
// positive definite diffusion block. Values with nonpositive time separation
// are zero; separations inside (0, 1e-12) are refused because the kernel is
// then an unresolvable spike and callers almost certainly passed bad times.
class FundamentalSolution {
 public:
  FundamentalSolution(const LieStructure& S, Eigen::MatrixXd A0);

  // Kernel with the pole at the group origin.
  double at_origin(const GroupPoint& z) const;

  // Two point kernel, the origin kernel moved by a group translation.
  double operator()(const GroupPoint& z, const GroupPoint& pole) const;

  // Derivatives in the diffusive coordinates of the pole, one entry per
  // coordinate of the first block. Analytic, not finite differenced.
  Eigen::VectorXd pole_gradient(const GroupPoint& z, const GroupPoint& pole) const;

  GammaSlice slice(double tau) const;
  double at_slice(const GammaSlice& sl, const Eigen::VectorXd& w) const;

  const LieStructure& structure() const { return S_; }
  const Eigen::MatrixXd& diffusion() const { return A0_; }
  const CovariancePoly& covariance_poly() const { return poly_; }

  static constexpr double min_time_separation = 1e-12;

 private:
  LieStructure S_;
  Eigen::MatrixXd A0_;
  CovariancePoly poly_;
  double trB_;
};

// Integral of the kernel over all space at a fixed positive time, by composite
// Gauss panels on a box of +-half_width_sigmas standard deviations per axis.
// The exact value is one; the returned number measures quadrature plus
// normalization error.
double gamma_mass_quadrature(const FundamentalSolution& fs, double t,
                             double half_width_sigmas = 10.0, int nodes = 16);

// Integral over a single spatial slab at time s of the kernel based at z
// against a bounded function of space. Uses the Gaussian substitution, so the
// cost is independent of the kernel's spread.
double gamma_slab_integral(const FundamentalSolution& fs, const GroupPoint& z, double s,
                           const std::function<double(const Eigen::VectorXd&)>& f,
                           int gh_nodes = 16);

struct PotentialOptions {
  int tau_nodes = 16;       // Gauss nodes per time panel
  int refine_levels = 6;    // dyadic panel refinement toward the evaluation time
  int gh_nodes = 16;        // Hermite nodes per spatial axis
};

// Space time potential of f against the kernel over the slab
// [t_lo, min(t_hi, z.t)] in time and all of space.
double gamma_potential(const FundamentalSolution& fs, const GroupPoint& z,
                       const std::function<double(const Eigen::VectorXd&, double)>& f,
                       double t_lo, double t_hi, const PotentialOptions& opts = {});

struct ReproductionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_gap = 0.0;
  double rel_gap = 0.0;
};

// Semigroup reproduction through an intermediate time s strictly between the
// pole time and z.t. The intermediate integral runs over a fixed box with
// composite Gauss panels so the verification does not reuse the Gaussian
// substitution being verified.
ReproductionCheck chapman_kolmogorov_check(const FundamentalSolution& fs, const GroupPoint& z,
                                           const GroupPoint& pole, double s, int nodes = 16);

struct PotentialEstimateReport {
  std::vector<double> ratios;   // sup of the potential over the norm of the source
  double fitted_c = 0.0;
  double p = 0.0;
};

// Sup bound for the potential of compactly supported smooth bumps against the
// L^p norm of the source, sampled over random bumps. The fitted constant is
// the largest observed ratio.
PotentialEstimateReport potential_estimate_check(const FundamentalSolution& fs, double box_half,
                                                 double T, double p, int n_bumps, int n_points,
                                                 std::uint64_t seed);

}  // namespace kolmo
