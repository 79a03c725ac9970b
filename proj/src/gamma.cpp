#include <kolmo/gamma.hpp>
#include <kolmo/quadrature.hpp>

#include <cmath>
#include <stdexcept>

namespace kolmo {

FundamentalSolution::FundamentalSolution(const LieStructure& S, Eigen::MatrixXd A0)
    : S_(S), A0_(std::move(A0)), poly_(S, A0_), trB_(S.B().trace()) {}

GammaSlice FundamentalSolution::slice(double tau) const {
  if (tau < min_time_separation)
    throw std::runtime_error("fundamental solution slice needs a time separation >= 1e-12");
  GammaSlice sl;
  sl.tau = tau;
  sl.E = exp_group(S_, tau);
  Eigen::MatrixXd C = poly_.eval(tau);
  sl.C_solver.compute(C);
  double log_det = 0.0;
  for (int i = 0; i < C.rows(); ++i) {
    const double d = sl.C_solver.vectorD()(i);
    if (!(d > 0.0))
      throw std::runtime_error("covariance factorization lost positivity; structure too deep "
                               "for this time separation");
    log_det += std::log(d);
  }
  const int N = S_.N();
  sl.log_norm = -0.5 * N * std::log(4.0 * M_PI) - 0.5 * log_det - tau * trB_;
  return sl;
}

double FundamentalSolution::at_slice(const GammaSlice& sl, const Eigen::VectorXd& w) const {
  const double quad = w.dot(sl.C_solver.solve(w));
  return std::exp(sl.log_norm - 0.25 * quad);
}

double FundamentalSolution::at_origin(const GroupPoint& z) const {
  if (z.t <= 0.0) return 0.0;
  if (z.t < min_time_separation)
    throw std::runtime_error("fundamental solution evaluated inside the unresolvable time "
                             "window (0, 1e-12); check the time arguments");
  return at_slice(slice(z.t), z.x);
}

double FundamentalSolution::operator()(const GroupPoint& z, const GroupPoint& pole) const {
  const double tau = z.t - pole.t;
  if (tau <= 0.0) return 0.0;
  if (tau < min_time_separation)
    throw std::runtime_error("fundamental solution evaluated inside the unresolvable time "
                             "window (0, 1e-12); check the time arguments");
  const GammaSlice sl = slice(tau);
  return at_slice(sl, z.x - sl.E * pole.x);
}

Eigen::VectorXd FundamentalSolution::pole_gradient(const GroupPoint& z,
                                                   const GroupPoint& pole) const {
  const double tau = z.t - pole.t;
  const int m0 = S_.m0();
  if (tau <= 0.0) return Eigen::VectorXd::Zero(m0);
  if (tau < min_time_separation)
    throw std::runtime_error("fundamental solution gradient evaluated inside the unresolvable "
                             "time window (0, 1e-12)");
  const GammaSlice sl = slice(tau);
  const Eigen::VectorXd w = z.x - sl.E * pole.x;
  const double value = at_slice(sl, w);
  const Eigen::VectorXd full = 0.5 * value * (sl.E.transpose() * sl.C_solver.solve(w));
  return full.head(m0);
}

namespace {

// Recursive tensor product of one dimensional panels.
void mass_recurse(const FundamentalSolution& fs, const GammaSlice& sl, Eigen::VectorXd& x,
                  int axis, const std::vector<std::vector<double>>& nodes,
                  const std::vector<std::vector<double>>& weights, double w_acc, double& total) {
  if (axis == x.size()) {
    total += w_acc * fs.at_slice(sl, x);
    return;
  }
  for (std::size_t i = 0; i < nodes[axis].size(); ++i) {
    x(axis) = nodes[axis][i];
    mass_recurse(fs, sl, x, axis + 1, nodes, weights, w_acc * weights[axis][i], total);
  }
}

}  // namespace

double gamma_mass_quadrature(const FundamentalSolution& fs, double t, double half_width_sigmas,
                             int nodes) {
  const GammaSlice sl = fs.slice(t);
  const Eigen::MatrixXd C = fs.covariance_poly().eval(t);
  const int N = C.rows();
  const QuadRule base = gauss_legendre_rule(nodes);
  std::vector<std::vector<double>> xs(N), ws(N);
  for (int i = 0; i < N; ++i) {
    const double sigma = std::sqrt(2.0 * C(i, i));
    const double half = half_width_sigmas * sigma;
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * half_width_sigmas)));
    for (int p = 0; p < panels; ++p) {
      const double a = -half + 2.0 * half * p / panels;
      const double b = -half + 2.0 * half * (p + 1) / panels;
      const QuadRule r = map_rule(base, a, b);
      xs[i].insert(xs[i].end(), r.nodes.begin(), r.nodes.end());
      ws[i].insert(ws[i].end(), r.weights.begin(), r.weights.end());
    }
  }
  Eigen::VectorXd x(N);
  double total = 0.0;
  mass_recurse(fs, sl, x, 0, xs, ws, 1.0, total);
  return total;
}

}  // namespace kolmo
