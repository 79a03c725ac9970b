#include <kolmo/cylinder.hpp>
#include <kolmo/rng.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {

double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// Uniform draw from the unit cylinder: one unit-ball draw per block plus a
// uniform time in (-1, 0].
GroupPoint sample_unit_cylinder(const LieStructure& S, const CounterRng& rng,
                                std::uint64_t stream, std::uint64_t step) {
  Eigen::VectorXd x(S.N());
  int off = 0;
  std::uint64_t slot = 0;
  for (int j = 0; j <= S.kappa(); ++j) {
    const int d = S.blocks().m[j];
    if (d == 1) {
      x(off) = rng.uniform(stream, step, slot++, -1.0, 1.0);
    } else {
      Eigen::VectorXd g(d);
      for (int k = 0; k < d; ++k) g(k) = rng.normal(stream, step, slot++);
      const double u = rng.uniform(stream, step, slot++);
      x.segment(off, d) = g * (std::pow(u, 1.0 / d) / g.norm());
    }
    off += d;
  }
  const double t = -rng.uniform(stream, step, slot);
  return {std::move(x), t};
}

bool in_unit_cylinder(const LieStructure& S, const GroupPoint& zeta) {
  if (!(zeta.t > -1.0 && zeta.t <= 0.0)) return false;
  int off = 0;
  for (int j = 0; j <= S.kappa(); ++j) {
    const int d = S.blocks().m[j];
    if (zeta.x.segment(off, d).norm() >= 1.0) return false;
    off += d;
  }
  return true;
}

}  // namespace

bool cylinder_contains(const LieStructure& S, const Cylinder& c, const GroupPoint& z) {
  if (!(c.r > 0.0)) throw std::domain_error("cylinder radius must be positive");
  const GroupPoint w = compose(S, inverse(S, c.center), z);
  return in_unit_cylinder(S, dilate(S, 1.0 / c.r, w));
}

double unit_cylinder_measure(const LieStructure& S) {
  double v = 1.0;
  for (int j = 0; j <= S.kappa(); ++j) v *= unit_ball_volume(S.blocks().m[j]);
  return v;
}

double cylinder_measure(const LieStructure& S, double r) {
  if (!(r > 0.0)) throw std::domain_error("cylinder radius must be positive");
  return std::pow(r, S.Q() + 2) * unit_cylinder_measure(S);
}

CylinderMeasureCheck cylinder_measure_mc(const LieStructure& S, const Cylinder& c,
                                         std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  const int N = S.N();
  // Bounding box: the dilated unit cylinder contributes +-r^{alpha_i} per
  // coordinate around the drifted center E(tau) x0, tau in [-r^2, 0].
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(N, 1e300);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(N, -1e300);
  for (int k = 0; k <= 128; ++k) {
    const double tau = -c.r * c.r * k / 128.0;
    const Eigen::VectorXd ctr = exp_group(S, tau) * c.center.x;
    lo = lo.cwiseMin(ctr);
    hi = hi.cwiseMax(ctr);
  }
  for (int i = 0; i < N; ++i) {
    const double pad = std::pow(c.r, S.alpha()(i));
    lo(i) -= pad;
    hi(i) += pad;
  }
  double box = c.r * c.r;
  for (int i = 0; i < N; ++i) box *= hi(i) - lo(i);

  const CounterRng rng(seed);
  std::int64_t inside = 0;
  GroupPoint z;
  z.x.resize(N);
  for (std::int64_t s = 0; s < n_samples; ++s) {
    for (int i = 0; i < N; ++i)
      z.x(i) = rng.uniform(static_cast<std::uint64_t>(s), 0, i, lo(i), hi(i));
    z.t = c.center.t - c.r * c.r * rng.uniform(static_cast<std::uint64_t>(s), 0, N);
    if (cylinder_contains(S, c, z)) ++inside;
  }
  CylinderMeasureCheck out;
  out.n_samples = n_samples;
  out.exact = cylinder_measure(S, c.r);
  out.mc_estimate = box * static_cast<double>(inside) / static_cast<double>(n_samples);
  out.rel_error = std::abs(out.mc_estimate - out.exact) / out.exact;
  return out;
}

NestingEstimate cylinder_nesting_estimate(const LieStructure& S, double r, double rho,
                                          std::int64_t n_samples, std::uint64_t seed) {
  if (!(r > rho && rho > 0.0)) throw std::invalid_argument("need 0 < rho < r");
  const CounterRng rng(seed);
  std::vector<GroupPoint> zs, ws;
  zs.reserve(n_samples);
  ws.reserve(n_samples);
  for (std::int64_t s = 0; s < n_samples; ++s) {
    zs.push_back(dilate(S, rho, sample_unit_cylinder(S, rng, s, 0)));
    ws.push_back(sample_unit_cylinder(S, rng, s, 1));
  }
  const Cylinder big{GroupPoint{Eigen::VectorXd::Zero(S.N()), 0.0}, r};
  const auto all_inside = [&](double cc) {
    for (std::int64_t s = 0; s < n_samples; ++s) {
      const GroupPoint w = dilate(S, cc * (r - rho), ws[s]);
      if (!cylinder_contains(S, big, compose(S, zs[s], w))) return false;
    }
    return true;
  };
  NestingEstimate est;
  est.r = r;
  est.rho = rho;
  // Descending scan is robust if membership is not exactly monotone in c.
  const double c_max = 2.0 * r / (r - rho);
  for (int k = 200; k >= 1; --k) {
    const double cc = c_max * k / 200.0;
    if (all_inside(cc)) {
      est.c_tilde = cc;
      break;
    }
    ++est.violations;
  }
  return est;
}

SandwichEstimate cylinder_sandwich_estimate(const LieStructure& S, const Cylinder& c,
                                            std::int64_t n_samples, std::uint64_t seed) {
  const CounterRng rng(seed);
  SandwichEstimate est;
  // Outer constant: smallest s with every sampled cylinder point inside the
  // ball product of scale s r around the center coordinates.
  double s_out = 1.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const GroupPoint zeta = sample_unit_cylinder(S, rng, s, 2);
    const GroupPoint z = compose(S, c.center, dilate(S, c.r, zeta));
    int off = 0;
    for (int j = 0; j <= S.kappa(); ++j) {
      const int d = S.blocks().m[j];
      const double aj = 2 * j + 1;
      const double dist = (z.x.segment(off, d) - c.center.x.segment(off, d)).norm();
      s_out = std::max(s_out, std::pow(dist / std::pow(c.r, aj), 1.0 / aj));
      off += d;
    }
    if (z.t < c.center.t) s_out = std::max(s_out, std::sqrt(c.center.t - z.t) / c.r);
  }
  est.outer = s_out;
  // Inner constant: largest scale s whose ball product stays inside the
  // cylinder; the estimate reports 1/s.
  const auto ball_inside = [&](double sc) {
    for (std::int64_t s = 0; s < n_samples; ++s) {
      Eigen::VectorXd x(S.N());
      int off = 0;
      std::uint64_t slot = 0;
      for (int j = 0; j <= S.kappa(); ++j) {
        const int d = S.blocks().m[j];
        const double radius = std::pow(sc * c.r, 2 * j + 1);
        if (d == 1) {
          x(off) = c.center.x(off) + rng.uniform(s, 3, slot++, -radius, radius);
        } else {
          Eigen::VectorXd g(d);
          for (int k = 0; k < d; ++k) g(k) = rng.normal(s, 3, slot++);
          const double u = rng.uniform(s, 3, slot++);
          x.segment(off, d) =
              c.center.x.segment(off, d) + g * (radius * std::pow(u, 1.0 / d) / g.norm());
        }
        off += d;
      }
      const double t = c.center.t - sc * c.r * sc * c.r * rng.uniform(s, 3, slot);
      if (!cylinder_contains(S, c, {std::move(x), t})) return false;
    }
    return true;
  };
  est.inner = 1e9;
  for (int k = 200; k >= 1; --k) {
    const double sc = k / 200.0;
    if (ball_inside(sc)) {
      est.inner = 1.0 / sc;
      break;
    }
  }
  est.c_bar = std::max(est.outer, est.inner);
  return est;
}

}  // namespace kolmo
