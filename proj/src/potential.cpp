#include <kolmo/fields.hpp>
#include <kolmo/gamma.hpp>
#include <kolmo/quadrature.hpp>
#include <kolmo/rng.hpp>

#include <cmath>
#include <stdexcept>

namespace kolmo {

namespace {

void hermite_recurse(const std::function<double(const Eigen::VectorXd&)>& g, const QuadRule& gh,
                     Eigen::VectorXd& u, int axis, double w_acc, double& total) {
  if (axis == u.size()) {
    total += w_acc * g(u);
    return;
  }
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    u(axis) = gh.nodes[i];
    hermite_recurse(g, gh, u, axis + 1, w_acc * gh.weights[i], total);
  }
}

}  // namespace

double gamma_slab_integral(const FundamentalSolution& fs, const GroupPoint& z, double s,
                           const std::function<double(const Eigen::VectorXd&)>& f,
                           int gh_nodes) {
  const double tau = z.t - s;
  if (tau < FundamentalSolution::min_time_separation)
    throw std::domain_error("slab time must strictly precede the evaluation time");
  const LieStructure& S = fs.structure();
  const int N = S.N();
  const Eigen::MatrixXd Em = exp_group(S, -tau);
  const Eigen::VectorXd mu = Em * z.x;
  const Eigen::MatrixXd Sigma =
      2.0 * (Em * fs.covariance_poly().eval(tau) * Em.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("slab covariance factorization lost positivity");
  const Eigen::MatrixXd L = llt.matrixL();
  const QuadRule gh = gauss_hermite_rule(gh_nodes);
  Eigen::VectorXd u(N);
  double total = 0.0;
  const auto g = [&](const Eigen::VectorXd& uu) { return f(mu + L * uu); };
  hermite_recurse(g, gh, u, 0, 1.0, total);
  return std::exp(-tau * S.B().trace()) * total;
}

double gamma_potential(const FundamentalSolution& fs, const GroupPoint& z,
                       const std::function<double(const Eigen::VectorXd&, double)>& f,
                       double t_lo, double t_hi, const PotentialOptions& opts) {
  const double s_hi = std::min(t_hi, z.t);
  if (!(s_hi > t_lo)) return 0.0;
  const double span = s_hi - t_lo;
  // Dyadic panels shrinking toward s_hi resolve the short time separations
  // where the kernel concentrates.
  std::vector<double> bp;
  bp.push_back(t_lo);
  for (int k = 1; k <= opts.refine_levels; ++k) bp.push_back(s_hi - span * std::pow(0.5, k));
  bp.push_back(s_hi);
  const QuadRule base = gauss_legendre_rule(opts.tau_nodes);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
    const QuadRule r = map_rule(base, bp[p], bp[p + 1]);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double s = r.nodes[i];
      const auto slab_f = [&](const Eigen::VectorXd& y) { return f(y, s); };
      total += r.weights[i] * gamma_slab_integral(fs, z, s, slab_f, opts.gh_nodes);
    }
  }
  return total;
}

ReproductionCheck chapman_kolmogorov_check(const FundamentalSolution& fs, const GroupPoint& z,
                                           const GroupPoint& pole, double s, int nodes) {
  if (!(pole.t < s && s < z.t))
    throw std::domain_error("intermediate time must lie strictly between pole and evaluation");
  const LieStructure& S = fs.structure();
  const int N = S.N();
  const double tau1 = z.t - s, tau2 = s - pole.t;
  const GammaSlice sl1 = fs.slice(tau1), sl2 = fs.slice(tau2);
  // Both factors are Gaussian in the intermediate point. A fixed box covering
  // the eight sigma range of each factor makes the summation honest rather
  // than adapted to either shape.
  const Eigen::MatrixXd E1m = exp_group(S, -tau1);
  const Eigen::VectorXd mu1 = E1m * z.x;
  const Eigen::MatrixXd Sig1 = 2.0 * (E1m * fs.covariance_poly().eval(tau1) * E1m.transpose());
  const Eigen::VectorXd mu2 = sl2.E * pole.x;
  const Eigen::MatrixXd Sig2 = 2.0 * fs.covariance_poly().eval(tau2);
  const QuadRule base = gauss_legendre_rule(nodes);
  std::vector<std::vector<double>> xs(N), ws(N);
  for (int i = 0; i < N; ++i) {
    const double s1 = std::sqrt(Sig1(i, i)), s2 = std::sqrt(Sig2(i, i));
    const double lo = std::min(mu1(i) - 8.0 * s1, mu2(i) - 8.0 * s2);
    const double hi = std::max(mu1(i) + 8.0 * s1, mu2(i) + 8.0 * s2);
    const int panels =
        std::min(40, std::max(4, static_cast<int>(std::ceil((hi - lo) / std::min(s1, s2)))));
    for (int p = 0; p < panels; ++p) {
      const QuadRule r = map_rule(base, lo + (hi - lo) * p / panels,
                                  lo + (hi - lo) * (p + 1) / panels);
      xs[i].insert(xs[i].end(), r.nodes.begin(), r.nodes.end());
      ws[i].insert(ws[i].end(), r.weights.begin(), r.weights.end());
    }
  }
  // tensor sweep over all node combinations
  std::vector<std::size_t> idx(N, 0);
  Eigen::VectorXd y(N);
  double total = 0.0;
  bool done = false;
  while (!done) {
    double w_acc = 1.0;
    for (int i = 0; i < N; ++i) {
      y(i) = xs[i][idx[i]];
      w_acc *= ws[i][idx[i]];
    }
    total += w_acc * fs.at_slice(sl1, z.x - sl1.E * y) * fs.at_slice(sl2, y - mu2);
    int axis = N - 1;
    while (axis >= 0 && ++idx[axis] == xs[axis].size()) {
      idx[axis] = 0;
      --axis;
    }
    done = axis < 0;
  }
  ReproductionCheck out;
  out.lhs = total;
  out.rhs = fs(z, pole);
  out.abs_gap = std::abs(out.lhs - out.rhs);
  out.rel_gap = out.abs_gap / std::max(std::abs(out.rhs), 1e-300);
  return out;
}

PotentialEstimateReport potential_estimate_check(const FundamentalSolution& fs, double box_half,
                                                 double T, double p, int n_bumps, int n_points,
                                                 std::uint64_t seed) {
  if (!(p > 1.0)) throw std::invalid_argument("potential estimate needs p > 1");
  const int N = fs.structure().N();
  const CounterRng rng(seed);
  const auto primes = halton_primes();
  PotentialEstimateReport rep;
  rep.p = p;
  rep.fitted_c = 0.0;
  for (int b = 0; b < n_bumps; ++b) {
    const double sigma = box_half * rng.uniform(b, 0, 0, 0.1, 0.3);
    const double amp = rng.uniform(b, 0, 1, 0.5, 2.0);
    Eigen::VectorXd c(N);
    const double margin = std::max(0.0, box_half - 3.0 * sigma);
    for (int i = 0; i < N; ++i) c(i) = rng.uniform(b, 0, 2 + i, -margin, margin);
    const auto f = [&](const Eigen::VectorXd& y, double) {
      return amp * std::exp(-(y - c).squaredNorm() / (2.0 * sigma * sigma));
    };
    const double norm_f =
        amp * std::pow(T, 1.0 / p) *
        std::pow(2.0 * M_PI * sigma * sigma / p, 0.5 * N / p);
    const PotentialOptions light{8, 4, 8};  // smooth bumps need no deep refinement
    double sup = 0.0;
    for (int k = 0; k < n_points; ++k) {
      Eigen::VectorXd x(N);
      for (int i = 0; i < N; ++i)
        x(i) = box_half * (2.0 * halton(k, primes[i]) - 1.0);
      const GroupPoint z{x, T};
      sup = std::max(sup, std::abs(gamma_potential(fs, z, f, 0.0, T, light)));
    }
    rep.ratios.push_back(sup / norm_f);
    rep.fitted_c = std::max(rep.fitted_c, sup / norm_f);
  }
  return rep;
}

}  // namespace kolmo
