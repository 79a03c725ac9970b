#include <kolmo/obstacle.hpp>

#include <kolmo/kfp_checks.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {

void check_problem(const ObstacleProblem& ob) {
  if (ob.v.n < 3 || ob.x.n < 3)
    throw std::invalid_argument("obstacle march needs at least three nodes per spatial axis");
  if (ob.t.n < 2 || !(ob.t.hi > ob.t.lo))
    throw std::invalid_argument("obstacle march needs an increasing time axis with two slices");
  if (!ob.a || !ob.psi || !ob.g)
    throw std::invalid_argument("diffusion, obstacle and boundary data are required");
  if (!(ob.eps_floor > 0.0) || ob.eps_start < ob.eps_floor)
    throw std::invalid_argument("penalization ladder needs eps_start >= eps_floor > 0");
}

// The data faces must dominate the obstacle, otherwise the pinned values
// start in violation and no penalty can recover them.
void check_obstacle_under_data(const ObstacleProblem& ob) {
  const auto below = [&](double vv, double xx, double tt) {
    const double gd = ob.g(vv, xx, tt);
    if (ob.psi(vv, xx, tt) > gd + 1e-12 * (1.0 + std::abs(gd)))
      throw std::invalid_argument("obstacle exceeds the boundary data on a carrying face");
  };
  for (int i = 0; i < ob.v.n; ++i)
    for (int j = 0; j < ob.x.n; ++j) below(ob.v.coord(i), ob.x.coord(j), ob.t.lo);
  for (int k = 1; k < ob.t.n; ++k) {
    const double tt = ob.t.coord(k);
    for (int j = 0; j < ob.x.n; ++j) {
      below(ob.v.lo, ob.x.coord(j), tt);
      below(ob.v.hi, ob.x.coord(j), tt);
    }
    for (int i = 1; i + 1 < ob.v.n; ++i) {
      const double vv = ob.v.coord(i);
      if (vv > 0.0) below(vv, ob.x.hi, tt);
      if (vv < 0.0) below(vv, ob.x.lo, tt);
    }
  }
}

struct Sampled {
  Eigen::ArrayXXd Amid;  // (nv-1, nx), diffusion at velocity midpoints
  Eigen::ArrayXXd F;
  Eigen::ArrayXd vv, vpos, vneg;
  double dt_max = 0.0;
};

Sampled sample_coefficients(const ObstacleProblem& ob) {
  const int nv = ob.v.n, nx = ob.x.n;
  const double hv = ob.v.h(), hx = ob.x.h();
  Sampled s;
  s.Amid.resize(nv - 1, nx);
  for (int i = 0; i + 1 < nv; ++i) {
    const double vm = 0.5 * (ob.v.coord(i) + ob.v.coord(i + 1));
    for (int j = 0; j < nx; ++j) {
      s.Amid(i, j) = ob.a(vm, ob.x.coord(j));
      if (!(s.Amid(i, j) > 0.0))
        throw std::invalid_argument("diffusion coefficient must be positive");
    }
  }
  s.F.resize(nv, nx);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nx; ++j)
      s.F(i, j) = ob.f ? ob.f(ob.v.coord(i), ob.x.coord(j)) : 0.0;
  s.vv.resize(nv);
  for (int i = 0; i < nv; ++i) s.vv(i) = ob.v.coord(i);
  s.vpos = s.vv.max(0.0);
  s.vneg = s.vv.min(0.0);
  const double denom = 2.0 * s.Amid.maxCoeff() / (hv * hv) +
                       s.vv.abs().maxCoeff() / hx + std::abs(ob.rate);
  s.dt_max = 0.9 / denom;
  return s;
}

struct RungOutput {
  double complementarity = 0.0;
  double domination_gap = 0.0;
  long penalty_updates = 0;
  long projection_lifts = 0;
  int substeps = 0;
};

// One full march at a fixed penalization strength. When out is nonnull the
// recorded slices and the complementarity scan are filled in.
RungOutput march_rung(const ObstacleProblem& ob, const Sampled& s, double eps,
                      GridField* out) {
  const int nv = ob.v.n, nx = ob.x.n, nt = ob.t.n;
  const double hv = ob.v.h(), hx = ob.x.h();
  RungOutput rep;

  Eigen::ArrayXXd U(nv, nx), Unew(nv, nx), Rate(nv, nx), Psi(nv, nx);
  Eigen::ArrayXXd Gv(nv - 1, nx), Flux(nv - 1, nx), Gx(nv, nx - 1);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nx; ++j) {
      U(i, j) = ob.g(s.vv(i), ob.x.coord(j), ob.t.lo);
      Psi(i, j) = ob.psi(s.vv(i), ob.x.coord(j), ob.t.lo);
    }
  rep.domination_gap = (Psi - U).maxCoeff();

  const auto record = [&](int k) {
    if (!out) return;
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nx; ++j)
        out->values()(static_cast<Eigen::Index>(i * nx + j) * nt + k) = U(i, j);
  };
  record(0);

  // A node on a position edge evolves exactly when its row flows out there.
  const auto updates_col = [&](int i, int j) {
    if (j == 0) return s.vv(i) >= 0.0;
    if (j == nx - 1) return s.vv(i) <= 0.0;
    return true;
  };

  for (int k = 0; k + 1 < nt; ++k) {
    const double t0 = ob.t.coord(k), t1 = ob.t.coord(k + 1);
    const int n_sub =
        std::max(1, static_cast<int>(std::ceil((t1 - t0) / s.dt_max - 1e-12)));
    const double dt = (t1 - t0) / n_sub;
    const double blend = dt / eps;
    rep.substeps += n_sub;

    for (int sub = 0; sub < n_sub; ++sub) {
      const double t_new = t0 + (sub + 1) * dt;

      Gv = (U.bottomRows(nv - 1) - U.topRows(nv - 1)) / hv;
      Flux = s.Amid * Gv;
      Gx = (U.rightCols(nx - 1) - U.leftCols(nx - 1)) / hx;
      Rate.block(1, 1, nv - 2, nx - 2) =
          (Flux.bottomRows(nv - 2) - Flux.topRows(nv - 2)).middleCols(1, nx - 2) / hv +
          ((Gx.middleCols(1, nx - 2).colwise() * s.vpos) +
           (Gx.middleCols(0, nx - 2).colwise() * s.vneg))
              .middleRows(1, nv - 2) -
          ob.rate * U.block(1, 1, nv - 2, nx - 2) - s.F.block(1, 1, nv - 2, nx - 2);
      for (int i = 1; i + 1 < nv; ++i) {
        if (updates_col(i, 0))
          Rate(i, 0) = (Flux(i, 0) - Flux(i - 1, 0)) / hv + s.vv(i) * Gx(i, 0) -
                       ob.rate * U(i, 0) - s.F(i, 0);
        if (updates_col(i, nx - 1))
          Rate(i, nx - 1) = (Flux(i, nx - 1) - Flux(i - 1, nx - 1)) / hv +
                            s.vv(i) * Gx(i, nx - 2) - ob.rate * U(i, nx - 1) -
                            s.F(i, nx - 1);
      }

      Unew = U;
      Unew.block(1, 1, nv - 2, nx - 2) += dt * Rate.block(1, 1, nv - 2, nx - 2);
      for (int i = 1; i + 1 < nv; ++i) {
        if (updates_col(i, 0)) Unew(i, 0) = U(i, 0) + dt * Rate(i, 0);
        if (updates_col(i, nx - 1))
          Unew(i, nx - 1) = U(i, nx - 1) + dt * Rate(i, nx - 1);
      }

      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nx; ++j)
          Psi(i, j) = ob.psi(s.vv(i), ob.x.coord(j), t_new);

      for (int i = 1; i + 1 < nv; ++i)
        for (int j = 0; j < nx; ++j) {
          if (!updates_col(i, j)) continue;
          if (Unew(i, j) < Psi(i, j)) {
            // Treating the penalty term implicitly keeps any eps stable.
            Unew(i, j) = (Unew(i, j) + blend * Psi(i, j)) / (1.0 + blend);
            ++rep.penalty_updates;
            if (ob.project && Unew(i, j) < Psi(i, j)) {
              Unew(i, j) = Psi(i, j);
              ++rep.projection_lifts;
            }
          }
          if (out) {
            const double resid = Rate(i, j) - (Unew(i, j) - U(i, j)) / dt;
            const double c = std::min(Unew(i, j) - Psi(i, j), -resid);
            rep.complementarity = std::max(rep.complementarity, std::abs(c));
          }
        }

      for (int j = 0; j < nx; ++j) {
        Unew(0, j) = ob.g(ob.v.lo, ob.x.coord(j), t_new);
        Unew(nv - 1, j) = ob.g(ob.v.hi, ob.x.coord(j), t_new);
      }
      for (int i = 1; i + 1 < nv; ++i) {
        if (s.vv(i) < 0.0) Unew(i, 0) = ob.g(s.vv(i), ob.x.lo, t_new);
        if (s.vv(i) > 0.0) Unew(i, nx - 1) = ob.g(s.vv(i), ob.x.hi, t_new);
      }

      U.swap(Unew);
    }

    rep.domination_gap = std::max(rep.domination_gap, (Psi - U).maxCoeff());
    record(k + 1);
  }
  return rep;
}

}  // namespace

ObstacleSolution solve_obstacle(const ObstacleProblem& ob) {
  check_problem(ob);
  check_obstacle_under_data(ob);
  const Sampled s = sample_coefficients(ob);

  ObstacleSolution sol;
  sol.u = GridField(std::vector<Axis>{ob.v, ob.x, ob.t});

  double eps = ob.eps_start;
  int rungs = 0;
  for (;; eps *= 0.5) {
    ++rungs;
    const bool final_rung = eps <= ob.eps_floor;
    const RungOutput r = march_rung(ob, s, eps, final_rung ? &sol.u : nullptr);
    sol.report.penalty_updates += r.penalty_updates;
    sol.report.projection_lifts += r.projection_lifts;
    if (final_rung) {
      sol.report.complementarity = r.complementarity;
      sol.report.domination_gap = r.domination_gap;
      sol.report.final_epsilon = eps;
      sol.report.substeps = r.substeps;
      break;
    }
  }
  sol.report.ladder_rungs = rungs;
  return sol;
}

double energy_functional(const GridField& u, const GridField& flux,
                         const Coef2& a, const Coef2& f, double tol) {
  if (u.dim() != 3 || flux.dim() != 3)
    throw std::invalid_argument("field and flux need axes (v, x, t)");
  for (int d = 0; d < 3; ++d)
    if (u.axis(d).n != flux.axis(d).n)
      throw std::invalid_argument("field and flux grids disagree");
  if (!a) throw std::invalid_argument("diffusion coefficient is required");
  const Axis &av = u.axis(0), &ax = u.axis(1), &at = u.axis(2);
  const int nv = av.n, nx = ax.n, nt = at.n;
  if (nv < 3 || nx < 3 || nt < 2)
    throw std::invalid_argument("constraint check needs interior nodes and two slices");
  const double hv = av.h(), hx = ax.h(), ht = at.h();

  Eigen::ArrayXXd Amid(nv - 1, nx), F(nv, nx);
  for (int i = 0; i + 1 < nv; ++i) {
    const double vm = 0.5 * (av.coord(i) + av.coord(i + 1));
    for (int j = 0; j < nx; ++j) {
      Amid(i, j) = a(vm, ax.coord(j));
      if (!(Amid(i, j) > 0.0))
        throw std::invalid_argument("diffusion coefficient must be positive");
    }
  }
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nx; ++j)
      F(i, j) = f ? f(av.coord(i), ax.coord(j)) : 0.0;

  const auto uval = [&](int i, int j, int k) {
    return u.values()(static_cast<Eigen::Index>(i * nx + j) * nt + k);
  };
  const auto jval = [&](int i, int j, int k) {
    return flux.values()(static_cast<Eigen::Index>(i * nx + j) * nt + k);
  };

  double worst = 0.0;
  for (int k = 0; k + 1 < nt; ++k)
    for (int j = 1; j + 1 < nx; ++j)
      for (int i = 1; i + 1 < nv; ++i) {
        const double divaj =
            (Amid(i, j) * jval(i, j, k) - Amid(i - 1, j) * jval(i - 1, j, k)) / hv;
        const double vi = av.coord(i);
        const double ux = vi > 0.0 ? (uval(i, j + 1, k) - uval(i, j, k)) / hx
                          : vi < 0.0 ? (uval(i, j, k) - uval(i, j - 1, k)) / hx
                                     : 0.0;
        const double ut = (uval(i, j, k + 1) - uval(i, j, k)) / ht;
        worst = std::max(std::abs(divaj - F(i, j) + vi * ux - ut), worst);
      }
  if (worst > tol)
    throw std::invalid_argument("flux violates the divergence constraint by " +
                                std::to_string(worst));

  double total = 0.0;
  for (int k = 0; k < nt; ++k) {
    const double wt = ht * ((k == 0 || k == nt - 1) ? 0.5 : 1.0);
    for (int j = 0; j < nx; ++j) {
      const double wx = hx * ((j == 0 || j == nx - 1) ? 0.5 : 1.0);
      for (int i = 0; i + 1 < nv; ++i) {
        const double d = (uval(i + 1, j, k) - uval(i, j, k)) / hv - jval(i, j, k);
        total += 0.5 * Amid(i, j) * d * d * hv * wx * wt;
      }
    }
  }
  return total;
}

StabilityReport stability_bound_check(const ObstacleProblem& ob, int n_points) {
  const ObstacleSolution sol = solve_obstacle(ob);
  GridField gfield = GridField::sample(
      std::vector<Axis>{ob.v, ob.x, ob.t},
      [&](const Eigen::VectorXd& p) { return ob.g(p(0), p(1), p(2)); });

  KineticBox box;
  box.top = Eigen::Vector3d(0.5 * (ob.v.lo + ob.v.hi), 0.5 * (ob.x.lo + ob.x.hi),
                            ob.t.hi);
  box.rv = 0.5 * (ob.v.hi - ob.v.lo);
  box.rx = 0.5 * (ob.x.hi - ob.x.lo);
  box.depth = ob.t.hi - ob.t.lo;

  const auto surrogate = [&](const GridField& w) {
    const double l2sq =
        box_reduce(w, box, n_points, [](double y) { return y * y; }).mean *
        box.measure();
    const double gv = velocity_gradient_norm(w, box);
    const double td = transport_dual_norm(w, box);
    return std::sqrt(std::max(l2sq, 0.0) + gv * gv + td * td);
  };

  StabilityReport rep;
  rep.u_norm = surrogate(sol.u);
  rep.g_norm = surrogate(gfield);
  if (ob.f) {
    const double hv = ob.v.h(), hx = ob.x.h(), ht = ob.t.h();
    Eigen::VectorXd prof(ob.v.n);
    double total = 0.0;
    for (int j = 0; j < ob.x.n; ++j) {
      for (int i = 0; i < ob.v.n; ++i) prof(i) = ob.f(ob.v.coord(i), ob.x.coord(j));
      const double dual = dual_norm_velocity(prof, hv);
      total += dual * dual * hx * ht * ob.t.n;
    }
    rep.f_norm = std::sqrt(total);
  }
  const double denom = rep.g_norm + rep.f_norm;
  rep.ratio = denom > 0.0 ? rep.u_norm / denom : 0.0;
  return rep;
}

}  // namespace kolmo
