#include <kolmo/kfp.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace kolmo {

namespace {

void check_axes_2d(const KineticProblem& prob) {
  if (prob.v.n < 3 || prob.x.n < 3)
    throw std::invalid_argument("marching needs at least three nodes per spatial axis");
  if (prob.t.n < 2 || !(prob.t.hi > prob.t.lo))
    throw std::invalid_argument("marching needs an increasing time axis with two slices");
  if (!prob.a || !prob.initial || !prob.boundary)
    throw std::invalid_argument("diffusion, initial data and boundary data are required");
}

struct Sampled2 {
  Eigen::ArrayXXd Amid;  // (nv-1, nx), diffusion at velocity midpoints
  Eigen::ArrayXXd B, C, F;
  Eigen::ArrayXd vpos, vneg;
  double dt_max = 0.0;
};

Sampled2 sample_coefficients(const KineticProblem& prob, double safety) {
  const int nv = prob.v.n, nx = prob.x.n;
  const double hv = prob.v.h(), hx = prob.x.h();
  Sampled2 s;
  s.Amid.resize(nv - 1, nx);
  for (int i = 0; i + 1 < nv; ++i) {
    const double vm = 0.5 * (prob.v.coord(i) + prob.v.coord(i + 1));
    for (int j = 0; j < nx; ++j) {
      s.Amid(i, j) = prob.a(vm, prob.x.coord(j));
      if (!(s.Amid(i, j) > 0.0))
        throw std::invalid_argument("diffusion coefficient must be positive");
    }
  }
  s.B.resize(nv, nx);
  s.C.resize(nv, nx);
  s.F.resize(nv, nx);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nx; ++j) {
      const double vv = prob.v.coord(i), xx = prob.x.coord(j);
      s.B(i, j) = prob.b ? prob.b(vv, xx) : 0.0;
      s.C(i, j) = prob.c ? prob.c(vv, xx) : 0.0;
      s.F(i, j) = prob.f ? prob.f(vv, xx) : 0.0;
    }
  s.vpos.resize(nv);
  s.vneg.resize(nv);
  double maxv = 0.0;
  for (int i = 0; i < nv; ++i) {
    const double vv = prob.v.coord(i);
    s.vpos(i) = std::max(vv, 0.0);
    s.vneg(i) = std::min(vv, 0.0);
    maxv = std::max(maxv, std::abs(vv));
  }
  const double lam = s.Amid.maxCoeff();
  const double denom = 2.0 * lam / (hv * hv) + maxv / hx +
                       s.B.abs().maxCoeff() / hv + s.C.abs().maxCoeff();
  s.dt_max = safety / denom;
  return s;
}

int substeps_for(double span, double dt_max, double forced_dt) {
  if (forced_dt > 0.0) {
    if (forced_dt > dt_max * (1.0 + 1e-12))
      throw std::invalid_argument("time step " + std::to_string(forced_dt) +
                                  " exceeds the stability bound; largest stable step is " +
                                  std::to_string(dt_max));
    return std::max(1, static_cast<int>(std::ceil(span / forced_dt - 1e-12)));
  }
  return std::max(1, static_cast<int>(std::ceil(span / dt_max - 1e-12)));
}

}  // namespace

double stable_time_step(const KineticProblem& prob) {
  check_axes_2d(prob);
  return sample_coefficients(prob, MarchOptions{}.safety).dt_max;
}

GridField march_kinetic(const KineticProblem& prob, const MarchOptions& opts) {
  check_axes_2d(prob);
  const int nv = prob.v.n, nx = prob.x.n, nt = prob.t.n;
  const double hv = prob.v.h(), hx = prob.x.h();
  const Sampled2 s = sample_coefficients(prob, opts.safety);

  GridField out(std::vector<Axis>{prob.v, prob.x, prob.t});
  Eigen::ArrayXXd U(nv, nx);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nx; ++j) U(i, j) = prob.initial(prob.v.coord(i), prob.x.coord(j));

  const auto record = [&](int k) {
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nx; ++j)
        out.values()(static_cast<Eigen::Index>(i * nx + j) * nt + k) = U(i, j);
  };
  record(0);

  Eigen::ArrayXXd Flux(nv - 1, nx), Gv(nv - 1, nx), Gx(nv, nx - 1), rate(nv - 2, nx - 2);
  for (int k = 0; k + 1 < nt; ++k) {
    const double t0 = prob.t.coord(k), t1 = prob.t.coord(k + 1);
    const int n_sub = substeps_for(t1 - t0, s.dt_max, opts.forced_dt);
    const double dt = (t1 - t0) / n_sub;
    for (int sub = 0; sub < n_sub; ++sub) {
      const double t_new = t0 + (sub + 1) * dt;
      Gv = (U.bottomRows(nv - 1) - U.topRows(nv - 1)) / hv;
      Flux = s.Amid * Gv;
      Gx = (U.rightCols(nx - 1) - U.leftCols(nx - 1)) / hx;
      rate = (Flux.bottomRows(nv - 2) - Flux.topRows(nv - 2)).middleCols(1, nx - 2) / hv;
      rate += ((Gx.middleCols(1, nx - 2).colwise() * s.vpos) +
               (Gx.middleCols(0, nx - 2).colwise() * s.vneg))
                  .middleRows(1, nv - 2);
      rate += s.B.block(1, 1, nv - 2, nx - 2).max(0.0) *
                  Gv.middleRows(1, nv - 2).middleCols(1, nx - 2) +
              s.B.block(1, 1, nv - 2, nx - 2).min(0.0) *
                  Gv.topRows(nv - 2).middleCols(1, nx - 2);
      rate += s.C.block(1, 1, nv - 2, nx - 2) * U.block(1, 1, nv - 2, nx - 2) -
              s.F.block(1, 1, nv - 2, nx - 2);
      U.block(1, 1, nv - 2, nx - 2) += dt * rate;
      for (int j = 0; j < nx; ++j) {
        U(0, j) = prob.boundary(prob.v.coord(0), prob.x.coord(j), t_new);
        U(nv - 1, j) = prob.boundary(prob.v.coord(nv - 1), prob.x.coord(j), t_new);
      }
      for (int i = 1; i + 1 < nv; ++i) {
        U(i, 0) = prob.boundary(prob.v.coord(i), prob.x.coord(0), t_new);
        U(i, nx - 1) = prob.boundary(prob.v.coord(i), prob.x.coord(nx - 1), t_new);
      }
    }
    record(k + 1);
  }
  return out;
}

namespace {

struct GenericSetup {
  int n = 0;
  std::vector<int> ns;                 // node counts per spatial axis
  std::vector<Eigen::Index> sp;        // spatial strides, last axis fastest
  Eigen::Index spatial_size = 0;
  std::vector<Eigen::Index> interior;
  Eigen::MatrixXd vcoords;             // velocity values per interior node
  std::vector<Eigen::Index> boundary;
  Eigen::MatrixXd bcoords;
  std::vector<Eigen::VectorXd> Amid;   // per velocity axis, midpoint shifted
  Eigen::VectorXd C, F;
  double dt_max = 0.0;
};

GenericSetup build_setup(const KineticProblemN& prob, double safety) {
  const int n = prob.n;
  if (n < 1) throw std::invalid_argument("need at least one velocity axis");
  if (static_cast<int>(prob.axes.size()) != 2 * n + 1)
    throw std::invalid_argument("axis list must hold 2n spatial axes and time");
  if (!prob.a || !prob.initial || !prob.boundary)
    throw std::invalid_argument("diffusion, initial data and boundary data are required");
  const Axis& taxis = prob.axes.back();
  if (taxis.n < 2 || !(taxis.hi > taxis.lo))
    throw std::invalid_argument("marching needs an increasing time axis with two slices");

  GenericSetup g;
  g.n = n;
  g.ns.resize(2 * n);
  for (int d = 0; d < 2 * n; ++d) {
    g.ns[d] = prob.axes[d].n;
    if (g.ns[d] < 3)
      throw std::invalid_argument("marching needs at least three nodes per spatial axis");
  }
  g.sp.assign(2 * n, 1);
  Eigen::Index sz = 1;
  for (int d = 2 * n - 1; d >= 0; --d) {
    g.sp[d] = sz;
    sz *= g.ns[d];
  }
  g.spatial_size = sz;

  std::vector<int> idx(2 * n, 0);
  Eigen::VectorXd vx(2 * n);
  g.Amid.assign(n, Eigen::VectorXd::Zero(sz));
  g.C = Eigen::VectorXd::Zero(sz);
  g.F = Eigen::VectorXd::Zero(sz);
  double lam = 0.0;
  for (Eigen::Index f = 0; f < sz; ++f) {
    bool interior = true;
    for (int d = 0; d < 2 * n; ++d) {
      idx[d] = static_cast<int>(f / g.sp[d] % g.ns[d]);
      vx(d) = prob.axes[d].coord(idx[d]);
      if (idx[d] == 0 || idx[d] == g.ns[d] - 1) interior = false;
    }
    for (int k = 0; k < n; ++k) {
      if (idx[k] + 1 < g.ns[k]) {
        Eigen::VectorXd vm = vx;
        vm(k) += 0.5 * prob.axes[k].h();
        g.Amid[k](f) = prob.a(vm);
        if (!(g.Amid[k](f) > 0.0))
          throw std::invalid_argument("diffusion coefficient must be positive");
        lam = std::max(lam, g.Amid[k](f));
      }
    }
    g.C(f) = prob.c ? prob.c(vx) : 0.0;
    g.F(f) = prob.f ? prob.f(vx) : 0.0;
    if (interior)
      g.interior.push_back(f);
    else
      g.boundary.push_back(f);
  }
  g.vcoords.resize(static_cast<Eigen::Index>(g.interior.size()), n);
  for (std::size_t m = 0; m < g.interior.size(); ++m)
    for (int k = 0; k < n; ++k)
      g.vcoords(m, k) =
          prob.axes[k].coord(static_cast<int>(g.interior[m] / g.sp[k] % g.ns[k]));
  g.bcoords.resize(static_cast<Eigen::Index>(g.boundary.size()), 2 * n);
  for (std::size_t m = 0; m < g.boundary.size(); ++m)
    for (int d = 0; d < 2 * n; ++d)
      g.bcoords(m, d) =
          prob.axes[d].coord(static_cast<int>(g.boundary[m] / g.sp[d] % g.ns[d]));

  double denom = g.C.cwiseAbs().maxCoeff();
  for (int k = 0; k < n; ++k) {
    const double hv = prob.axes[k].h(), hx = prob.axes[n + k].h();
    const double maxv =
        std::max(std::abs(prob.axes[k].lo), std::abs(prob.axes[k].hi));
    denom += 2.0 * lam / (hv * hv) + maxv / hx;
  }
  g.dt_max = safety / denom;
  return g;
}

}  // namespace

double stable_time_step_general(const KineticProblemN& prob) {
  return build_setup(prob, MarchOptions{}.safety).dt_max;
}

GridField march_kinetic_general(const KineticProblemN& prob, const MarchOptions& opts) {
  const GenericSetup g = build_setup(prob, opts.safety);
  const int n = g.n;
  const Axis& taxis = prob.axes.back();
  const int nt = taxis.n;

  GridField out(prob.axes);
  Eigen::VectorXd u(g.spatial_size), unew(g.spatial_size);
  {
    Eigen::VectorXd vx(2 * n);
    std::vector<int> idx(2 * n, 0);
    for (Eigen::Index f = 0; f < g.spatial_size; ++f) {
      for (int d = 0; d < 2 * n; ++d)
        vx(d) = prob.axes[d].coord(static_cast<int>(f / g.sp[d] % g.ns[d]));
      u(f) = prob.initial(vx);
    }
  }
  const auto record = [&](int k) {
    for (Eigen::Index f = 0; f < g.spatial_size; ++f) out.values()(f * nt + k) = u(f);
  };
  record(0);

  for (int k = 0; k + 1 < nt; ++k) {
    const double t0 = taxis.coord(k), t1 = taxis.coord(k + 1);
    const int n_sub = substeps_for(t1 - t0, g.dt_max, opts.forced_dt);
    const double dt = (t1 - t0) / n_sub;
    for (int sub = 0; sub < n_sub; ++sub) {
      const double t_new = t0 + (sub + 1) * dt;
      for (std::size_t m = 0; m < g.interior.size(); ++m) {
        const Eigen::Index i = g.interior[m];
        double rate = g.C(i) * u(i) - g.F(i);
        for (int kk = 0; kk < n; ++kk) {
          const Eigen::Index sv = g.sp[kk];
          const double hv = prob.axes[kk].h();
          rate += (g.Amid[kk](i) * (u(i + sv) - u(i)) -
                   g.Amid[kk](i - sv) * (u(i) - u(i - sv))) /
                  (hv * hv);
          const double vk = g.vcoords(m, kk);
          const Eigen::Index sx = g.sp[n + kk];
          const double hx = prob.axes[n + kk].h();
          rate += vk > 0.0 ? vk * (u(i + sx) - u(i)) / hx : vk * (u(i) - u(i - sx)) / hx;
        }
        unew(i) = u(i) + dt * rate;
      }
      for (std::size_t m = 0; m < g.boundary.size(); ++m)
        unew(g.boundary[m]) = prob.boundary(g.bcoords.row(m).transpose(), t_new);
      u.swap(unew);
    }
    record(k + 1);
  }
  return out;
}

}  // namespace kolmo
