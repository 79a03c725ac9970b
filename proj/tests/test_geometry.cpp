#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kolmo/covariance.hpp>
#include <kolmo/cylinder.hpp>
#include <kolmo/fd.hpp>
#include <kolmo/fit.hpp>
#include <kolmo/holder.hpp>
#include <kolmo/norms.hpp>
#include <kolmo/rng.hpp>

#include <cmath>
#include <vector>

using namespace kolmo;

namespace {

// Oracle: truncated exponential series with 30 terms, independent of the
// nilpotent finite-sum shortcut.
Eigen::MatrixXd expm_series(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd term = S;
  for (int k = 1; k <= 30; ++k) {
    term = (M * term) / k;
    S += term;
  }
  return S;
}

// Oracle: Gauss-Legendre nodes and weights on (-1, 1) by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

// Oracle: covariance by 64-node Gauss-Legendre quadrature of the matrix
// integrand, with the series exponential.
Eigen::MatrixXd covariance_quadrature(const LieStructure& S, const Eigen::MatrixXd& A0,
                                      double t) {
  std::vector<double> x, w;
  gauss_legendre(64, x, w);
  Eigen::MatrixXd Abar = Eigen::MatrixXd::Zero(S.N(), S.N());
  Abar.topLeftCorner(S.m0(), S.m0()) = A0;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(S.N(), S.N());
  for (int i = 0; i < 64; ++i) {
    const double s = 0.5 * t * (x[i] + 1.0);
    const Eigen::MatrixXd E = expm_series(-s * S.B());
    C += (0.5 * t * w[i]) * (E * Abar * E.transpose());
  }
  return C;
}

GroupPoint random_point(const CounterRng& rng, std::uint64_t stream, std::uint64_t step, int N,
                        double scale = 2.0) {
  Eigen::VectorXd x(N);
  for (int i = 0; i < N; ++i) x(i) = rng.uniform(stream, step, i, -scale, scale);
  return {std::move(x), rng.uniform(stream, step, N, -scale, scale)};
}

double point_gap(const GroupPoint& a, const GroupPoint& b) {
  return std::max((a.x - b.x).cwiseAbs().maxCoeff(), std::abs(a.t - b.t));
}

std::vector<LieStructure> structure_library() {
  std::vector<LieStructure> lib;
  lib.push_back(LieStructure::kinetic(1));
  lib.push_back(LieStructure::kinetic(2));
  lib.push_back(LieStructure::parabolic(1));
  lib.push_back(LieStructure::parabolic(3));
  {
    BlockStructure b;  // chain of depth 3
    b.kappa = 3;
    b.m = {1, 1, 1, 1};
    b.N = 4;
    b.blocks = {Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, -0.8),
                Eigen::MatrixXd::Constant(1, 1, 1.3)};
    lib.push_back(LieStructure(std::move(b)));
  }
  {
    BlockStructure b;  // mixed heights (2, 1, 1)
    b.kappa = 2;
    b.m = {2, 1, 1};
    b.N = 4;
    Eigen::MatrixXd b1(1, 2);
    b1 << 0.7, 0.4;
    b.blocks = {b1, Eigen::MatrixXd::Constant(1, 1, 1.5)};
    lib.push_back(LieStructure(std::move(b)));
  }
  return lib;
}

}  // namespace

TEST_CASE("block structure validation enforces the canonical form") {
  CHECK_NOTHROW(validate(BlockStructure::kinetic(3)));
  CHECK_NOTHROW(validate(BlockStructure::parabolic(2)));

  BlockStructure grow;
  grow.kappa = 1;
  grow.m = {1, 2};  // heights must not increase
  grow.N = 3;
  grow.blocks = {Eigen::MatrixXd::Identity(2, 1)};
  CHECK_THROWS_AS(validate(grow), std::invalid_argument);

  BlockStructure rankdef = BlockStructure::kinetic(2);
  rankdef.blocks[0] << 1.0, 2.0, 0.5, 1.0;  // singular sub-block
  CHECK_THROWS_AS(validate(rankdef), std::invalid_argument);

  BlockStructure badsum = BlockStructure::kinetic(2);
  badsum.N = 5;
  CHECK_THROWS_AS(validate(badsum), std::invalid_argument);

  BlockStructure badshape = BlockStructure::kinetic(2);
  badshape.blocks[0] = Eigen::MatrixXd::Identity(2, 3);
  CHECK_THROWS_AS(validate(badshape), std::invalid_argument);
}

TEST_CASE("dilation exponents and homogeneous dimension") {
  CHECK(LieStructure::kinetic(1).Q() == 4);
  CHECK(LieStructure::kinetic(3).Q() == 12);
  CHECK(LieStructure::parabolic(5).Q() == 5);
  const auto lib = structure_library();
  CHECK(lib[4].Q() == 1 + 3 + 5 + 7);
  const Eigen::VectorXi& a = lib[5].alpha();
  CHECK(a(0) == 1);
  CHECK(a(1) == 1);
  CHECK(a(2) == 3);
  CHECK(a(3) == 5);
}

TEST_CASE("drift exponential is the exact finite sum") {
  for (const auto& S : structure_library()) {
    for (double s : {-1.7, -0.3, 0.4, 1.0, 2.6}) {
      const Eigen::MatrixXd E = exp_group(S, s);
      const Eigen::MatrixXd ref = expm_series(-s * S.B());
      CHECK((E - ref).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + ref.cwiseAbs().maxCoeff()));
      CHECK(std::abs(E.determinant() - 1.0) <= 1e-12);
      CHECK((exp_group(S, s) * exp_group(S, -s) - Eigen::MatrixXd::Identity(S.N(), S.N()))
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
      // one-parameter group property
      const Eigen::MatrixXd Eab = exp_group(S, s + 0.9);
      CHECK((Eab - exp_group(S, s) * exp_group(S, 0.9)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  Eigen::MatrixXd E1 = exp_group(LieStructure::kinetic(1), 1.0);
  CHECK(E1(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(E1(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(E1(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(E1(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("group product, inverse and dilation on pinned examples") {
  const LieStructure S = LieStructure::kinetic(1);
  GroupPoint a{Eigen::Vector2d(1.0, 0.0), 0.0};
  GroupPoint b{Eigen::Vector2d(0.0, 0.0), 1.0};
  const GroupPoint ab = compose(S, a, b);
  CHECK(ab.x(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ab.x(1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(ab.t == doctest::Approx(1.0).epsilon(1e-14));

  const GroupPoint inv = inverse(S, {Eigen::Vector2d(1.0, 2.0), 3.0});
  CHECK(inv.x(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(inv.x(1) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(inv.t == doctest::Approx(-3.0).epsilon(1e-14));

  const GroupPoint d = dilate(S, 2.0, {Eigen::Vector2d(1.0, 1.0), 1.0});
  CHECK(d.x(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.x(1) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(d.t == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(dilate(S, 0.0, d), std::domain_error);
  CHECK_THROWS_AS(dilate(S, -1.0, d), std::domain_error);

  const GroupPoint altab = compose_kinetic_alt(a, b);
  CHECK(altab.x(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(altab.x(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(altab.t == doctest::Approx(1.0).epsilon(1e-14));
  const GroupPoint altinv = inverse_kinetic_alt({Eigen::Vector2d(1.0, 2.0), 3.0});
  CHECK(altinv.x(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(altinv.x(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(altinv.t == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("group axioms on random triples") {
  const CounterRng rng(20240818);
  for (const auto& S : structure_library()) {
    const int N = S.N();
    const GroupPoint e{Eigen::VectorXd::Zero(N), 0.0};
    double worst = 0.0;
    for (int k = 0; k < 10000 / 6; ++k) {
      const GroupPoint a = random_point(rng, k, 1, N);
      const GroupPoint b = random_point(rng, k, 2, N);
      const GroupPoint c = random_point(rng, k, 3, N);
      worst = std::max(worst, point_gap(compose(S, compose(S, a, b), c),
                                        compose(S, a, compose(S, b, c))));
      worst = std::max(worst, point_gap(compose(S, e, a), a));
      worst = std::max(worst, point_gap(compose(S, a, e), a));
      worst = std::max(worst, point_gap(compose(S, inverse(S, a), a), e));
      worst = std::max(worst, point_gap(compose(S, a, inverse(S, a)), e));
      // dilations are automorphisms
      const GroupPoint lhs = dilate(S, 1.7, compose(S, a, b));
      const GroupPoint rhs = compose(S, dilate(S, 1.7, a), dilate(S, 1.7, b));
      worst = std::max(worst, point_gap(lhs, rhs) / 50.0);
    }
    CHECK(worst <= 1e-12);
  }
  // the alternate kinetic law is a group law as well
  double worst = 0.0;
  const GroupPoint e{Eigen::VectorXd::Zero(2), 0.0};
  for (int k = 0; k < 2000; ++k) {
    const GroupPoint a = random_point(rng, k, 4, 2);
    const GroupPoint b = random_point(rng, k, 5, 2);
    const GroupPoint c = random_point(rng, k, 6, 2);
    worst = std::max(worst, point_gap(compose_kinetic_alt(compose_kinetic_alt(a, b), c),
                                      compose_kinetic_alt(a, compose_kinetic_alt(b, c))));
    worst = std::max(worst, point_gap(compose_kinetic_alt(inverse_kinetic_alt(a), a), e));
    worst = std::max(worst, point_gap(compose_kinetic_alt(a, inverse_kinetic_alt(a)), e));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("left invariance pins the operator orientation for each law") {
  const LieStructure S = LieStructure::kinetic(1);
  const Eigen::MatrixXd A0 = Eigen::MatrixXd::Identity(1, 1);
  const auto u = [](const GroupPoint& z) {
    return std::sin(1.3 * z.x(0) + 0.7 * z.x(1) + 0.5 * z.t) +
           std::cos(0.9 * z.x(1) - 0.4 * z.t) * std::exp(0.2 * z.x(0));
  };
  const GroupPoint zeta{Eigen::Vector2d(0.8, -0.6), 0.45};
  const GroupPoint z{Eigen::Vector2d(0.3, 0.2), -0.15};
  const std::vector<double> hs = {0.2, 0.1, 0.05, 0.025};

  // canonical law against the drift-and-backward-time orientation
  {
    const auto composed = [&](const GroupPoint& p) { return u(compose(S, zeta, p)); };
    std::vector<double> res;
    for (double h : hs)
      res.push_back(std::abs(principal_fd(S, A0, composed, z, h, 1.0) -
                             principal_fd(S, A0, u, compose(S, zeta, z), h, 1.0)));
    CHECK(fit_order(hs, res) >= 1.9);
  }
  // alternate law against the opposite transport orientation
  {
    const auto composed = [&](const GroupPoint& p) { return u(compose_kinetic_alt(zeta, p)); };
    std::vector<double> res;
    for (double h : hs)
      res.push_back(std::abs(principal_fd(S, A0, composed, z, h, -1.0) -
                             principal_fd(S, A0, u, compose_kinetic_alt(zeta, z), h, -1.0)));
    CHECK(fit_order(hs, res) >= 1.9);
  }
  // mismatched pairing must not cancel: the defect stays order one
  {
    const auto composed = [&](const GroupPoint& p) { return u(compose(S, zeta, p)); };
    const double res = std::abs(principal_fd(S, A0, composed, z, 0.0125, -1.0) -
                                principal_fd(S, A0, u, compose(S, zeta, z), 0.0125, -1.0));
    CHECK(res >= 1e-2);
  }
}

TEST_CASE("homogeneous norm solves its level equation and scales exactly") {
  const LieStructure S = LieStructure::kinetic(1);
  // Oracle: for z = (1, 1, 0) the level equation reduces to u^3 - u^2 - 1 = 0
  // in u = r^2; Newton from u = 1.5.
  double uroot = 1.5;
  for (int it = 0; it < 60; ++it)
    uroot -= (uroot * uroot * uroot - uroot * uroot - 1.0) / (3.0 * uroot * uroot - 2.0 * uroot);
  const double expected = std::sqrt(uroot);
  const GroupPoint z{Eigen::Vector2d(1.0, 1.0), 0.0};
  CHECK(homogeneous_norm(S, z) == doctest::Approx(expected).epsilon(1e-10));

  const CounterRng rng(77);
  for (const auto& L : structure_library()) {
    double worst_scale = 0.0, worst_level = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
    for (int k = 0; k < 300; ++k) {
      const GroupPoint p = random_point(rng, k, 7, L.N());
      const double n = homogeneous_norm(L, p);
      const double r = 0.3 + 2.0 * rng.uniform(k, 8, 0);
      worst_scale = std::max(worst_scale,
                             std::abs(homogeneous_norm(L, dilate(L, r, p)) - r * n) / (r * n));
      double level = p.t * p.t / std::pow(n, 4);
      for (int i = 0; i < L.N(); ++i)
        level += p.x(i) * p.x(i) / std::pow(n, 2.0 * L.alpha()(i));
      worst_level = std::max(worst_level, std::abs(level - 1.0));
      const double q = n / norm1(L, p);
      ratio_lo = std::min(ratio_lo, q);
      ratio_hi = std::max(ratio_hi, q);
    }
    CHECK(worst_scale <= 1e-10);
    CHECK(worst_level <= 1e-10);
    // equivalence with the seed norm: finite structure-dependent constants
    CHECK(ratio_lo > 0.0);
    CHECK(std::isfinite(ratio_hi));
    CHECK(ratio_hi / ratio_lo < 50.0);
  }
  CHECK(homogeneous_norm(S, {Eigen::Vector2d::Zero(), 0.0}) == 0.0);
}

TEST_CASE("distance is left invariant with a finite quasi-triangle constant") {
  const LieStructure S = LieStructure::kinetic(1);
  const CounterRng rng(31415);
  double worst_inv = 0.0, worst_quasi = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const GroupPoint z = random_point(rng, k, 10, 2);
    const GroupPoint w = random_point(rng, k, 11, 2);
    const GroupPoint zeta = random_point(rng, k, 12, 2);
    const double d = distance(S, z, w);
    worst_inv = std::max(worst_inv,
                         std::abs(distance(S, compose(S, zeta, z), compose(S, zeta, w)) - d) /
                             (d + 1e-30));
    const double via = distance(S, z, zeta) + distance(S, zeta, w);
    if (via > 0.0) worst_quasi = std::max(worst_quasi, d / via);
  }
  CHECK(worst_inv <= 1e-10);
  CHECK(std::isfinite(worst_quasi));
  MESSAGE("fitted quasi-triangle constant: ", worst_quasi);
  CHECK(worst_quasi < 4.0);
}

TEST_CASE("covariance matches quadrature and the pinned kinetic values") {
  const Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(1, 1);
  const LieStructure K = LieStructure::kinetic(1);
  const Eigen::MatrixXd C1 = covariance(K, I1, 1.0);
  CHECK(C1(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(C1(0, 1) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(C1(1, 0) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(C1(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const Eigen::MatrixXd C = covariance(K, I1, t);
    CHECK(std::abs(C.determinant() - std::pow(t, 4) / 12.0) <=
          1e-12 * std::max(1.0, std::pow(t, 4) / 12.0));
  }
  for (const auto& S : structure_library()) {
    Eigen::MatrixXd A0 = Eigen::MatrixXd::Identity(S.m0(), S.m0());
    if (S.m0() >= 2) {
      A0(0, 1) = A0(1, 0) = 0.3;
      A0(0, 0) = 2.0;
    }
    for (double t : {0.25, 1.0, 2.0}) {
      const Eigen::MatrixXd C = covariance(S, A0, t);
      const Eigen::MatrixXd ref = covariance_quadrature(S, A0, t);
      CHECK((C - ref).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
  }
  CHECK_THROWS_AS(covariance(K, I1, 0.0), std::domain_error);
  CHECK_THROWS_AS(covariance(K, I1, -1.0), std::domain_error);
  Eigen::MatrixXd bad(1, 1);
  bad << -1.0;
  CHECK_THROWS_AS(covariance(K, bad, 1.0), std::invalid_argument);
}

TEST_CASE("hypoellipticity holds for every canonical structure") {
  for (const auto& S : structure_library()) {
    Eigen::MatrixXd A0 = Eigen::MatrixXd::Identity(S.m0(), S.m0());
    const auto rep = hypoellipticity_check(S, A0);
    CHECK(rep.hypoelliptic);
    CHECK(rep.kalman_rank == S.N());
    CHECK(rep.min_eigenvalue > 0.0);
  }
}

TEST_CASE("cylinder membership, exact measure and Monte Carlo volume") {
  const LieStructure S = LieStructure::kinetic(1);
  const Cylinder c{GroupPoint{Eigen::Vector2d(0.3, -0.2), 0.1}, 0.7};
  // center of the dilated unit cylinder, shifted slightly into the past
  GroupPoint probe = compose(S, c.center, dilate(S, c.r, {Eigen::Vector2d(0.0, 0.0), -0.5}));
  CHECK(cylinder_contains(S, c, probe));
  GroupPoint outside = compose(S, c.center, dilate(S, c.r, {Eigen::Vector2d(1.2, 0.0), -0.5}));
  CHECK(!cylinder_contains(S, c, outside));

  CHECK(cylinder_measure(S, 1.0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(cylinder_measure(S, 0.5) == doctest::Approx(4.0 * std::pow(0.5, 6)).epsilon(1e-13));

  const auto mc = cylinder_measure_mc(S, c, 200000, 99);
  CHECK(mc.rel_error <= 0.02);

  const auto nest = cylinder_nesting_estimate(S, 1.0, 0.5, 2000, 7);
  CHECK(nest.c_tilde > 0.05);
  MESSAGE("nesting constant estimate: ", nest.c_tilde);

  const auto flat = cylinder_sandwich_estimate(
      S, Cylinder{GroupPoint{Eigen::Vector2d::Zero(), 0.0}, 0.8}, 20000, 3);
  CHECK(flat.c_bar <= 1.05);  // origin-centered cylinders are exact ball products
  const auto slanted = cylinder_sandwich_estimate(
      S, Cylinder{GroupPoint{Eigen::Vector2d(1.0, 0.0), 0.0}, 0.5}, 20000, 4);
  CHECK(slanted.outer >= 1.0);
  CHECK(slanted.outer <= 3.0);
  CHECK(slanted.c_bar >= slanted.outer);
  MESSAGE("slanted sandwich constant: ", slanted.c_bar);
}

TEST_CASE("holder seminorm on grid samples") {
  const LieStructure S = LieStructure::kinetic(1);
  std::vector<Axis> axes = {{-1.0, 1.0, 21}, {-1.0, 1.0, 21}, {-1.0, 0.0, 11}};
  const GridField flat = GridField::sample(axes, [](const Eigen::VectorXd&) { return 3.7; });
  CHECK(holder_seminorm(S, flat, 0.5, 5000, 5) == 0.0);

  const GridField rooted = GridField::sample(axes, [&](const Eigen::VectorXd& p) {
    return std::sqrt(homogeneous_norm(S, {p.head(2), p(2)}));
  });
  const double s1 = holder_seminorm(S, rooted, 0.5, 20000, 5);
  const double s2 = holder_seminorm(S, rooted, 0.5, 40000, 5);
  CHECK(s1 > 0.0);
  CHECK(s2 >= s1);
  CHECK((s2 - s1) / s1 <= 0.2);  // stable under doubling the pair budget
  MESSAGE("seminorm estimate: ", s2);

  CHECK_THROWS_AS(holder_seminorm(S, rooted, 1.5, 10, 1), std::domain_error);
  CHECK_THROWS_AS(holder_seminorm(S, rooted, 0.0, 10, 1), std::domain_error);
}
