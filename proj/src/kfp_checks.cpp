#include <kolmo/kfp_checks.hpp>

#include <kolmo/fit.hpp>
#include <kolmo/group.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {

constexpr double kEdgeSlack = 1e-12;
// Homogeneous dimension of the kinetic structure in one velocity variable:
// weight one in velocity, three in position, plus two for time.
constexpr double kQplus2 = 6.0;

void require_vxt(const GridField& u) {
  if (u.dim() != 3)
    throw std::invalid_argument("field must carry (velocity, position, time) axes");
}

// Inclusive index range of axis nodes inside [lo, hi].
std::pair<int, int> node_range(const Axis& ax, double lo, double hi) {
  if (ax.n < 2 || ax.h() <= 0.0) {
    const double c = ax.coord(0);
    return c >= lo - kEdgeSlack && c <= hi + kEdgeSlack ? std::pair{0, 0} : std::pair{0, -1};
  }
  int i0 = static_cast<int>(std::ceil((lo - ax.lo) / ax.h() - kEdgeSlack));
  int i1 = static_cast<int>(std::floor((hi - ax.lo) / ax.h() + kEdgeSlack));
  return {std::max(i0, 0), std::min(i1, ax.n - 1)};
}

}  // namespace

KineticBox KineticBox::cylinder(const Eigen::Vector3d& top, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
  KineticBox b;
  b.top = top;
  b.rv = r;
  b.rx = r * r * r;
  b.depth = r * r;
  return b;
}

bool KineticBox::contains(double v, double x, double t) const {
  return std::abs(v - top(0)) <= rv + kEdgeSlack &&
         std::abs(x - top(1)) <= rx + kEdgeSlack && t <= top(2) + kEdgeSlack &&
         t > top(2) - depth - kEdgeSlack;
}

std::vector<Eigen::Vector3d> box_lattice(const KineticBox& box, int n_points) {
  if (n_points < 1) throw std::invalid_argument("lattice needs at least one point");
  std::vector<Eigen::Vector3d> pts(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double u1 = halton(i, 2), u2 = halton(i, 3), u3 = halton(i, 5);
    pts[i] = {box.top(0) + (2.0 * u1 - 1.0) * box.rv,
              box.top(1) + (2.0 * u2 - 1.0) * box.rx, box.top(2) - u3 * box.depth};
  }
  return pts;
}

BoxReduce box_reduce(const GridField& u, const KineticBox& box, int n_points,
                     const std::function<double(double)>& transform) {
  require_vxt(u);
  const auto f = [&](double y) { return transform ? transform(y) : y; };
  BoxReduce r{-std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity(), 0.0};
  Eigen::VectorXd p(3);
  for (const Eigen::Vector3d& q : box_lattice(box, n_points)) {
    p = q;
    const double y = f(u.interp(p));
    r.sup = std::max(r.sup, y);
    r.inf = std::min(r.inf, y);
    r.mean += y;
  }
  r.mean /= n_points;

  const auto [i0, i1] = node_range(u.axis(0), box.top(0) - box.rv, box.top(0) + box.rv);
  const auto [j0, j1] = node_range(u.axis(1), box.top(1) - box.rx, box.top(1) + box.rx);
  const auto [k0, k1] = node_range(u.axis(2), box.top(2) - box.depth, box.top(2));
  const int nx = u.axis(1).n, nt = u.axis(2).n;
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j)
      for (int k = k0; k <= k1; ++k) {
        const double y =
            f(u.values()(static_cast<Eigen::Index>(i * nx + j) * nt + k));
        r.sup = std::max(r.sup, y);
        r.inf = std::min(r.inf, y);
      }
  return r;
}

MoserReport moser_check(const GridField& u, const Eigen::Vector3d& top, double rho,
                        double r, double p, double q, double f_norm, int n_points) {
  if (!(rho > 0.0) || rho >= r || r > 1.0)
    throw std::invalid_argument("cylinder radii must satisfy 0 < rho < r <= 1");
  if (!(p >= 1.0)) throw std::invalid_argument("power must be at least one");
  if (!(q > 1.0)) throw std::invalid_argument("integrability exponent must exceed one");
  const double beta = q / (q - 1.0);
  const auto lift_pow = [&](double y, double e) {
    return std::pow(std::max(y + f_norm, 0.0), e);
  };

  MoserReport rep;
  const KineticBox inner = KineticBox::cylinder(top, rho);
  const KineticBox outer = KineticBox::cylinder(top, r);
  rep.sup_small =
      box_reduce(u, inner, n_points, [&](double y) { return lift_pow(y, p); }).sup;
  const double mean =
      box_reduce(u, outer, n_points, [&](double y) { return lift_pow(y, p * beta); })
          .mean;
  rep.norm_big = std::pow(std::max(mean, 0.0) * outer.measure(), 1.0 / beta);
  rep.ratio = rep.norm_big > 0.0
                  ? rep.sup_small * std::pow(r - rho, kQplus2 / beta) / rep.norm_big
                  : std::numeric_limits<double>::infinity();
  return rep;
}

KineticBox HarnackGeometry::plus() const {
  return {{0.0, 0.0, 0.0}, omega, omega * omega * omega, omega * omega};
}

KineticBox HarnackGeometry::minus_tilde() const {
  return {{0.0, 0.0, -1.0 + 2.0 * rho * rho}, rho, rho * rho * rho, rho * rho};
}

KineticBox HarnackGeometry::minus_weak() const {
  return {{0.0, 0.0, -1.0 + omega * omega}, omega, omega * omega * omega,
          omega * omega};
}

KineticBox HarnackGeometry::zero_box() const {
  return {{0.0, 0.0, -1.0}, eta, eta * eta * eta, eta * eta};
}

KineticBox HarnackGeometry::ext_box() const {
  return {{0.0, 0.0, 0.0}, 2.0 * R, 8.0 * R, 1.0 + eta * eta};
}

KineticBox HarnackGeometry::unit() const { return {{0.0, 0.0, 0.0}, 1.0, 1.0, 1.0}; }

void validate(const HarnackGeometry& geom) {
  if (!(geom.omega > 0.0 && geom.omega < 1.0))
    throw std::invalid_argument("late box radius must lie in (0, 1)");
  if (!(geom.rho > 0.0 && geom.rho < geom.omega / std::sqrt(2.0)))
    throw std::invalid_argument(
        "early box radius must stay below the late radius over root two");
  if (-1.0 + 2.0 * geom.rho * geom.rho > -geom.omega * geom.omega)
    throw std::invalid_argument("early box must end before the late box starts");
  if (!(geom.eta > 0.0 && geom.eta < 1.0))
    throw std::invalid_argument("vanishing box parameter must lie in (0, 1)");
  if (!(geom.R > 1.0))
    throw std::invalid_argument("extension factor must exceed one");
}

HarnackReport harnack_ratio(const GridField& u, const HarnackGeometry& geom,
                            double f_norm, int n_points) {
  validate(geom);
  HarnackReport rep;
  rep.numerator = box_reduce(u, geom.minus_tilde(), n_points).sup;
  rep.inf_plus = box_reduce(u, geom.plus(), n_points).inf;
  const double denom = rep.inf_plus + f_norm;
  if (denom <= 0.0) {
    rep.unbounded = true;
    rep.ratio = std::numeric_limits<double>::infinity();
  } else {
    rep.ratio = rep.numerator / denom;
  }
  return rep;
}

HarnackReport weak_harnack_ratio(const GridField& u, const HarnackGeometry& geom,
                                 double p, double f_norm, int n_points) {
  validate(geom);
  if (!(p > 0.0)) throw std::invalid_argument("mean exponent must be positive");
  HarnackReport rep;
  const KineticBox early = geom.minus_weak();
  const double mean =
      box_reduce(u, early, n_points, [&](double y) {
        return std::pow(std::max(y, 0.0), p);
      }).mean;
  rep.numerator = std::pow(std::max(mean, 0.0) * early.measure(), 1.0 / p);
  rep.inf_plus = box_reduce(u, geom.plus(), n_points).inf;
  const double denom = rep.inf_plus + f_norm;
  if (denom <= 0.0) {
    rep.unbounded = true;
    rep.ratio = std::numeric_limits<double>::infinity();
  } else {
    rep.ratio = rep.numerator / denom;
  }
  return rep;
}

std::vector<ChainLink> harnack_chain(const GridField& u, const LieStructure& S,
                                     const std::vector<Eigen::Vector3d>& points,
                                     const HarnackGeometry& geom) {
  require_vxt(u);
  validate(geom);
  if (points.size() < 2)
    throw std::invalid_argument("a chain needs at least two points");

  std::vector<ChainLink> links(points.size() - 1);
  const double tau_hi = -1.0 + 2.0 * geom.rho * geom.rho;
  const double tau_lo = -1.0 + geom.rho * geom.rho;
  Eigen::VectorXd p(3);
  for (std::size_t j = 1; j < points.size(); ++j) {
    ChainLink& link = links[j - 1];
    p = points[j - 1];
    const double prev = u.interp(p);
    p = points[j];
    const double next = u.interp(p);
    if (prev <= 0.0) {
      link.broken = true;
    } else {
      link.constant = std::max(next / prev, 1.0);
    }

    const GroupPoint late{points[j].head(2), points[j](2)};
    const GroupPoint early{points[j - 1].head(2), points[j - 1](2)};
    const GroupPoint w = compose(S, inverse(S, late), early);
    if (w.t < 0.0) {
      const double r2_lo = w.t / tau_lo, r2_hi = w.t / tau_hi;
      for (int s = 0; s <= 64 && !link.admissible; ++s) {
        const double r2 = r2_hi + (r2_lo - r2_hi) * s / 64.0;
        const double r = std::sqrt(r2);
        const GroupPoint scaled = dilate(S, 1.0 / r, w);
        link.admissible = std::abs(scaled.x(0)) <= geom.rho + kEdgeSlack &&
                          std::abs(scaled.x(1)) <=
                              geom.rho * geom.rho * geom.rho + kEdgeSlack;
      }
    }
  }
  return links;
}

HolderReport holder_estimate(const GridField& u, const Eigen::Vector3d& top,
                             double r_hi, int levels, double f_norm, int n_points) {
  require_vxt(u);
  if (!(r_hi > 0.0) || levels < 3)
    throw std::invalid_argument("need a positive radius and at least three levels");
  const double hv = u.axis(0).h(), ht = u.axis(2).h();

  HolderReport rep;
  for (int k = 0; k < levels; ++k) {
    const double r = r_hi * std::pow(2.0, -k);
    const KineticBox box = KineticBox::cylinder(top, r);
    // The position extent shrinks with the cube of r and may drop below one
    // cell while interpolation still resolves the box; only the velocity and
    // time extents gate the level.
    if (box.rv < 2.0 * hv || box.depth < 2.0 * ht) break;
    const BoxReduce red = box_reduce(u, box, n_points);
    rep.radii.push_back(r);
    rep.oscillations.push_back(red.sup - red.inf);
  }
  if (rep.radii.size() < 3)
    throw std::runtime_error("grid resolves fewer than three dyadic levels");

  const double osc_top = *std::max_element(rep.oscillations.begin(), rep.oscillations.end());
  const BoxReduce whole = box_reduce(u, KineticBox::cylinder(top, 1.0), n_points);
  const double scale = std::max(std::abs(whole.sup), std::abs(whole.inf));
  if (osc_top <= 1e-13 * std::max(scale, 1.0)) {
    rep.alpha = 1.0;
    return rep;
  }

  rep.alpha = std::min(std::max(fit_order(rep.radii, rep.oscillations), 0.01), 1.0);
  for (std::size_t k = 0; k < rep.radii.size(); ++k)
    rep.seminorm = std::max(
        rep.seminorm, rep.oscillations[k] / std::pow(rep.radii[k], rep.alpha));
  const double l2 =
      std::sqrt(std::max(
          box_reduce(u, KineticBox::cylinder(top, 1.0), n_points,
                     [](double y) { return y * y; })
              .mean,
          0.0) *
      KineticBox::cylinder(top, 1.0).measure());
  const double denom = l2 + f_norm;
  rep.fitted_c = denom > 0.0 ? rep.seminorm / denom
                             : std::numeric_limits<double>::infinity();
  return rep;
}

double dual_norm_velocity(const Eigen::VectorXd& g, double h) {
  const Eigen::Index m = g.size();
  if (m == 0) return 0.0;
  if (!(h > 0.0)) throw std::invalid_argument("spacing must be positive");
  const double diag = 2.0 / (h * h) + 1.0, off = -1.0 / (h * h);
  Eigen::VectorXd c(m), d(m);
  c(0) = off / diag;
  d(0) = g(0) / diag;
  for (Eigen::Index i = 1; i < m; ++i) {
    const double denom = diag - off * c(i - 1);
    c(i) = off / denom;
    d(i) = (g(i) - off * d(i - 1)) / denom;
  }
  Eigen::VectorXd w(m);
  w(m - 1) = d(m - 1);
  for (Eigen::Index i = m - 2; i >= 0; --i) w(i) = d(i) - c(i) * w(i + 1);
  return std::sqrt(std::max(h * g.dot(w), 0.0));
}

double transport_dual_norm(const GridField& u, const KineticBox& box) {
  require_vxt(u);
  const Axis& av = u.axis(0);
  const Axis& ax = u.axis(1);
  const Axis& at = u.axis(2);
  const double hv = av.h(), hx = ax.h(), ht = at.h();
  const auto [i0, i1] = node_range(av, box.top(0) - box.rv, box.top(0) + box.rv);
  const auto [j0, j1] = node_range(ax, box.top(1) - box.rx, box.top(1) + box.rx);
  const auto [k0, k1] = node_range(at, box.top(2) - box.depth, box.top(2));
  if (i1 < i0 || j1 < j0 || k1 < k0) return 0.0;

  const int nx = ax.n, nt = at.n;
  const auto val = [&](int i, int j, int k) {
    return u.values()(static_cast<Eigen::Index>(i * nx + j) * nt + k);
  };
  double total = 0.0;
  Eigen::VectorXd g(i1 - i0 + 1);
  for (int j = j0; j <= j1; ++j)
    for (int k = std::max(k0, 1); k <= k1; ++k) {
      for (int i = i0; i <= i1; ++i) {
        const double v = av.coord(i);
        double dudx;
        if (v > 0.0)
          dudx = j + 1 < nx ? (val(i, j + 1, k) - val(i, j, k)) / hx
                            : (val(i, j, k) - val(i, j - 1, k)) / hx;
        else
          dudx = j > 0 ? (val(i, j, k) - val(i, j - 1, k)) / hx
                       : (val(i, j + 1, k) - val(i, j, k)) / hx;
        const double dudt = (val(i, j, k) - val(i, j, k - 1)) / ht;
        g(i - i0) = v * dudx - dudt;
      }
      const double dual = dual_norm_velocity(g, hv);
      total += dual * dual * hx * ht;
    }
  return std::sqrt(total);
}

double velocity_gradient_norm(const GridField& u, const KineticBox& box) {
  require_vxt(u);
  const Axis& av = u.axis(0);
  const Axis& ax = u.axis(1);
  const Axis& at = u.axis(2);
  const double hv = av.h(), hx = ax.h(), ht = at.h();
  const auto [i0, i1] = node_range(av, box.top(0) - box.rv, box.top(0) + box.rv);
  const auto [j0, j1] = node_range(ax, box.top(1) - box.rx, box.top(1) + box.rx);
  const auto [k0, k1] = node_range(at, box.top(2) - box.depth, box.top(2));
  if (i1 <= i0 || j1 < j0 || k1 < k0) return 0.0;

  const int nx = ax.n, nt = at.n;
  double total = 0.0;
  for (int i = i0; i < i1; ++i)
    for (int j = j0; j <= j1; ++j)
      for (int k = k0; k <= k1; ++k) {
        const double lo = u.values()(static_cast<Eigen::Index>(i * nx + j) * nt + k);
        const double hi =
            u.values()(static_cast<Eigen::Index>((i + 1) * nx + j) * nt + k);
        const double d = (hi - lo) / hv;
        total += d * d * hv * hx * ht;
      }
  return std::sqrt(total);
}

VelocityMoments moments(const GridField& u, int ix, int it) {
  require_vxt(u);
  const Axis& av = u.axis(0);
  const int nx = u.axis(1).n, nt = u.axis(2).n;
  if (ix < 0 || ix >= nx || it < 0 || it >= nt)
    throw std::invalid_argument("section indices out of range");
  const double hv = av.h();
  VelocityMoments m;
  for (int i = 0; i < av.n; ++i) {
    const double w = (i == 0 || i == av.n - 1) ? 0.5 * hv : hv;
    const double y = u.values()(static_cast<Eigen::Index>(i * nx + ix) * nt + it);
    const double v = av.coord(i);
    m.mass += w * y;
    m.energy += w * y * v * v;
    if (y > 0.0)
      m.entropy += w * y * std::log(y);
    else if (y < 0.0)
      m.clipped = true;
  }
  return m;
}

}  // namespace kolmo
