#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kolmo/fit.hpp>
#include <kolmo/gamma.hpp>
#include <kolmo/kfp.hpp>
#include <kolmo/kfp_checks.hpp>
#include <kolmo/poincare.hpp>
#include <kolmo/sobolev.hpp>
#include <kolmo/structure.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

using namespace kolmo;

namespace {

GridField constant_field(double value) {
  std::vector<Axis> axes{{-1.3, 1.3, 41}, {-1.3, 1.3, 41}, {-1.3, 0.0, 41}};
  GridField g(axes);
  g.values().setConstant(value);
  return g;
}

struct SliceCache {
  double tau = -1.0;
  std::unique_ptr<GammaSlice> sl;
};

// Positive solution of the constant-coefficient equation: the closed-form
// kernel with its pole 1.8 below the domain top, marched from its own data.
GridField kernel_translate_solve(const FundamentalSolution& fs, int ns) {
  const double shift = 1.8;
  KineticProblem prob;
  prob.v = {-1.3, 1.3, ns};
  prob.x = {-1.3, 1.3, ns};
  prob.t = {-1.3, 0.0, 2 * ns};
  prob.a = [](double, double) { return 1.0; };
  auto cache = std::make_shared<SliceCache>();
  const auto gamma = [&fs, cache, shift](double v, double x, double t) {
    const double tau = t + shift;
    if (cache->tau != tau) {
      cache->sl = std::make_unique<GammaSlice>(fs.slice(tau));
      cache->tau = tau;
    }
    return fs.at_slice(*cache->sl, Eigen::Vector2d(v, x));
  };
  prob.initial = [&, gamma](double v, double x) { return gamma(v, x, prob.t.lo); };
  prob.boundary = gamma;
  return march_kinetic(prob);
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("velocity dual norm matches the discrete eigenfunction algebra") {
  CHECK(dual_norm_velocity(Eigen::VectorXd::Zero(25), 0.1) == 0.0);

  std::mt19937 gen(3);
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(31);
  for (int i = 0; i < g.size(); ++i) g(i) = normal(gen);
  const double base = dual_norm_velocity(g, 0.05);
  CHECK(dual_norm_velocity(-2.5 * g, 0.05) ==
        doctest::Approx(2.5 * base).epsilon(1e-13));

  std::vector<double> hs, errs;
  const double target = std::sqrt(0.5 / (M_PI * M_PI + 1.0));
  for (int m : {50, 100, 200}) {
    const double h = 1.0 / (m + 1);
    Eigen::VectorXd s(m);
    for (int i = 0; i < m; ++i) s(i) = std::sin(M_PI * (i + 1) * h);
    const double got = dual_norm_velocity(s, h);
    const double lam_h = 4.0 / (h * h) * std::pow(std::sin(M_PI * h / 2.0), 2);
    const double predicted = std::sqrt(0.5 / (1.0 + lam_h));
    CHECK(got == doctest::Approx(predicted).epsilon(1e-12));
    hs.push_back(h);
    errs.push_back(std::abs(got - target));
  }
  CHECK(fit_order(hs, errs) >= 1.9);
}

TEST_CASE("local boundedness ratio reduces to hand constants on constant data") {
  const GridField one = constant_field(1.0);
  const double rho = 0.55, r = 0.9, beta = 4.0 / 3.0;
  const MoserReport rep = moser_check(one, {0.0, 0.0, 0.0}, rho, r, 2.0, 4.0, 0.0, 512);
  CHECK(rep.sup_small == doctest::Approx(1.0).epsilon(1e-13));
  const double expected = std::pow(r - rho, 6.0 / beta) /
                          std::pow(4.0 * std::pow(r, 6.0), 1.0 / beta);
  CHECK(rep.ratio == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(moser_check(one, {0, 0, 0}, 0.9, 0.55, 2, 4, 0, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(moser_check(one, {0, 0, 0}, 0.5, 1.2, 2, 4, 0, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(moser_check(one, {0, 0, 0}, 0.5, 0.9, 0.5, 4, 0, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(moser_check(one, {0, 0, 0}, 0.5, 0.9, 2, 1.0, 0, 64),
                  std::invalid_argument);
}

TEST_CASE("harnack ratios are exact on constants and invariant under scaling") {
  const GridField one = constant_field(1.0);
  const HarnackGeometry geom;
  const HarnackReport rep = harnack_ratio(one, geom, 0.0, 512);
  CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_FALSE(rep.unbounded);

  const HarnackReport shifted = harnack_ratio(one, geom, 0.5, 512);
  CHECK(shifted.ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  const HarnackReport weak = weak_harnack_ratio(one, geom, 2.0, 0.0, 512);
  const double early_measure = 4.0 * std::pow(geom.omega, 6.0);
  CHECK(weak.numerator == doctest::Approx(std::sqrt(early_measure)).epsilon(1e-12));
  CHECK(weak.ratio == doctest::Approx(std::sqrt(early_measure)).epsilon(1e-12));

  const GridField zero = constant_field(0.0);
  CHECK(harnack_ratio(zero, geom, 0.0, 256).unbounded);

  HarnackGeometry bad = geom;
  bad.omega = 1.2;
  CHECK_THROWS_AS(harnack_ratio(one, bad, 0.0, 64), std::invalid_argument);
  bad = geom;
  bad.rho = 0.6;
  CHECK_THROWS_AS(harnack_ratio(one, bad, 0.0, 64), std::invalid_argument);
  bad = geom;
  bad.omega = 0.95;
  bad.rho = 0.55;
  CHECK_THROWS_AS(harnack_ratio(one, bad, 0.0, 64), std::invalid_argument);
}

TEST_CASE("kernel translate solve gives a finite ratio unchanged by doubling") {
  const LieStructure S = LieStructure::kinetic(1);
  const FundamentalSolution fs(S, Eigen::MatrixXd::Identity(1, 1));
  const GridField u = kernel_translate_solve(fs, 65);
  const HarnackGeometry geom;
  const HarnackReport rep = harnack_ratio(u, geom, 0.0, 2048);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio >= 1.0);

  GridField doubled = u;
  doubled.values() *= 2.0;
  CHECK(harnack_ratio(doubled, geom, 0.0, 2048).ratio == rep.ratio);

  const MoserReport mos = moser_check(u, {0, 0, 0}, 0.55, 0.9, 2, 4, 0.0, 2048);
  CHECK(std::isfinite(mos.ratio));
  CHECK(mos.ratio > 0.0);
}

TEST_CASE("oscillation decay reports unit exponent for smooth and constant data") {
  std::vector<Axis> axes{{-1.3, 1.3, 81}, {-1.3, 1.3, 81}, {-1.3, 0.0, 81}};
  GridField flat(axes);
  flat.values().setConstant(0.75);
  const HolderReport fr = holder_estimate(flat, {0, 0, 0}, 0.8, 4, 0.0, 512);
  CHECK(fr.alpha == 1.0);
  CHECK(fr.seminorm == 0.0);

  const GridField smooth = GridField::sample(axes, [](const Eigen::VectorXd& p) {
    return std::sin(p(0) + 0.5 * p(1)) + 0.3 * std::cos(2.0 * p(2));
  });
  const HolderReport sr = holder_estimate(smooth, {0, 0, 0}, 0.8, 4, 0.0, 2048);
  CHECK(sr.radii.size() >= 3);
  CHECK(sr.alpha >= 0.9);
  CHECK(sr.seminorm > 0.0);
  CHECK(std::isfinite(sr.fitted_c));

  std::vector<Axis> tiny{{-1.3, 1.3, 5}, {-1.3, 1.3, 5}, {-1.3, 0.0, 5}};
  GridField coarse(tiny);
  coarse.values().setZero();
  CHECK_THROWS_AS(holder_estimate(coarse, {0, 0, 0}, 0.8, 4, 0.0, 64),
                  std::runtime_error);
}

TEST_CASE("chain constants clip at one and admissibility needs forward time") {
  const LieStructure S = LieStructure::kinetic(1);
  const HarnackGeometry geom;
  const GridField one = constant_field(1.0);

  const Eigen::Vector3d late{0.0, 0.0, 0.0};
  const double r = 0.8;
  const double mid_tau = -1.0 + 1.5 * geom.rho * geom.rho;
  const Eigen::Vector3d early{0.25, 0.0, mid_tau * r * r};

  const auto links = harnack_chain(one, S, {early, late}, geom);
  REQUIRE(links.size() == 1);
  CHECK(links[0].constant == 1.0);
  CHECK_FALSE(links[0].broken);
  CHECK(links[0].admissible);

  const auto reversed = harnack_chain(one, S, {late, early}, geom);
  CHECK_FALSE(reversed[0].admissible);

  const GridField zero = constant_field(0.0);
  CHECK(harnack_chain(zero, S, {early, late}, geom)[0].broken);

  CHECK_THROWS_AS(harnack_chain(one, S, {late}, geom), std::invalid_argument);

  const FundamentalSolution fs(S, Eigen::MatrixXd::Identity(1, 1));
  const GridField u = kernel_translate_solve(fs, 65);
  const std::vector<Eigen::Vector3d> path{{0.3, 0.1, -1.1}, {0.15, 0.04, -0.6},
                                          {0.0, 0.0, -0.1}};
  for (const ChainLink& link : harnack_chain(u, S, path, geom)) {
    CHECK_FALSE(link.broken);
    CHECK(std::isfinite(link.constant));
    CHECK(link.constant >= 1.0);
  }
}

TEST_CASE("velocity section moments recover gaussian mass and energy") {
  std::vector<Axis> axes{{-8.0, 8.0, 401}, {0.0, 0.0, 1}, {0.0, 0.0, 1}};
  GridField g = GridField::sample(axes, [](const Eigen::VectorXd& p) {
    return std::exp(-0.5 * p(0) * p(0)) / std::sqrt(2.0 * M_PI);
  });
  const VelocityMoments m = moments(g, 0, 0);
  CHECK(m.mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.energy == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(m.entropy ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI) - 0.5).epsilon(1e-9));
  CHECK_FALSE(m.clipped);

  GridField z(axes);
  z.values().setZero();
  const VelocityMoments mz = moments(z, 0, 0);
  CHECK(mz.mass == 0.0);
  CHECK(mz.energy == 0.0);
  CHECK(mz.entropy == 0.0);

  g.values()(5) = -0.1;
  CHECK(moments(g, 0, 0).clipped);
  CHECK_THROWS_AS(moments(g, 3, 0), std::invalid_argument);
}

namespace {

GridField separable_field(const std::array<int, 3>& k, const std::array<int, 2>& l,
                          const std::array<double, 2>& c, double amp, int n_lead,
                          int n_rest) {
  std::vector<Axis> axes{{0, 1, n_lead}, {0, 1, n_lead}, {0, 1, n_lead},
                         {0, 1, n_rest}, {0, 1, n_rest}};
  GridField g(axes);
  std::array<Eigen::VectorXd, 3> lead;
  for (int a = 0; a < 3; ++a) {
    lead[a].resize(n_lead);
    for (int i = 0; i < n_lead; ++i)
      lead[a](i) = std::sin(M_PI * k[a] * i / (n_lead - 1.0));
  }
  std::array<Eigen::VectorXd, 2> rest;
  for (int a = 0; a < 2; ++a) {
    rest[a].resize(n_rest);
    for (int i = 0; i < n_rest; ++i)
      rest[a](i) = c[a] + std::cos(2.0 * M_PI * l[a] * i / (n_rest - 1.0));
  }
  Eigen::Index f = 0;
  for (int i1 = 0; i1 < n_lead; ++i1)
    for (int i2 = 0; i2 < n_lead; ++i2)
      for (int i3 = 0; i3 < n_lead; ++i3) {
        const double lead_part = amp * lead[0](i1) * lead[1](i2) * lead[2](i3);
        for (int j1 = 0; j1 < n_rest; ++j1)
          for (int j2 = 0; j2 < n_rest; ++j2)
            g.values()(f++) = lead_part * rest[0](j1) * rest[1](j2);
      }
  return g;
}

double power_integral(double q) { return q == 2 ? 0.5 : q == 4 ? 0.375 : 0.3125; }

double forward_symbol(int k, double h) {
  const double s = 2.0 / h * std::sin(M_PI * k * h / 2.0);
  return s * s;
}

}  // namespace

TEST_CASE("embedding check matches the separable closed form exactly") {
  const int n_lead = 32, n_rest = 9;
  const double h = 1.0 / (n_lead - 1);
  std::mt19937 gen(17);
  std::uniform_int_distribution<int> kdist(1, 3), ldist(1, 2);
  std::uniform_real_distribution<double> cdist(0.5, 1.5), adist(0.5, 2.0);

  for (int trial = 0; trial < 3; ++trial) {
    const std::array<int, 3> k{kdist(gen), kdist(gen), kdist(gen)};
    const std::array<int, 2> l{ldist(gen), ldist(gen)};
    const std::array<double, 2> c{cdist(gen), cdist(gen)};
    const double amp = adist(gen);
    const GridField u = separable_field(k, l, c, amp, n_lead, n_rest);

    const double inner = amp * amp * (c[0] * c[0] + 0.5) * (c[1] * c[1] + 0.5) *
                         (forward_symbol(k[0], h) + forward_symbol(k[1], h) +
                          forward_symbol(k[2], h)) /
                         8.0;
    for (double q : {2.0, 4.0, 6.0}) {
      const SobolevReport rep = sobolev_embedding_check(u, 3, q);
      const double lhs_oracle =
          std::pow(std::abs(amp * c[0] * c[1]), q) * std::pow(power_integral(q), 3.0);
      const double rhs_oracle = std::pow(inner, 0.5 * q);
      CHECK(rep.lhs == doctest::Approx(lhs_oracle).epsilon(1e-10));
      CHECK(rep.rhs == doctest::Approx(rhs_oracle).epsilon(1e-10));
      CHECK(rep.lhs <= 1e3 * rep.rhs);
    }
  }
}

TEST_CASE("one constant covers one hundred random separable fields") {
  const int n_lead = 32, n_rest = 9;
  std::mt19937 gen(99);
  std::uniform_int_distribution<int> kdist(1, 3), ldist(1, 2);
  std::uniform_real_distribution<double> cdist(0.5, 1.5), adist(0.5, 2.0);
  const std::vector<double> qs{2.0, 4.0, 6.0};

  std::array<double, 3> fitted{0.0, 0.0, 0.0};
  for (int trial = 0; trial < 100; ++trial) {
    const GridField u = separable_field({kdist(gen), kdist(gen), kdist(gen)},
                                        {ldist(gen), ldist(gen)},
                                        {cdist(gen), cdist(gen)}, adist(gen),
                                        n_lead, n_rest);
    const auto reps = sobolev_embedding_multi(u, 3, qs);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      REQUIRE(reps[i].rhs > 0.0);
      fitted[i] = std::max(fitted[i], reps[i].lhs / reps[i].rhs);
    }
  }
  for (double c : fitted) {
    CHECK(std::isfinite(c));
    CHECK(c < 1e3);
  }
  MESSAGE("embedding constants over the family ", fitted[0], " ", fitted[1], " ",
          fitted[2]);
}

TEST_CASE("embedding exponent gates follow the critical value") {
  std::vector<Axis> axes{{0, 1, 8}, {0, 1, 8}, {0, 1, 8}, {0, 1, 5}, {0, 1, 5}};
  GridField u(axes);
  u.values().setZero();
  const SobolevReport rep = sobolev_embedding_check(u, 3, 6.0);
  CHECK(rep.lhs == 0.0);
  CHECK(rep.rhs == 0.0);
  CHECK_THROWS_AS(sobolev_embedding_check(u, 3, 6.5), std::invalid_argument);
  CHECK_THROWS_AS(sobolev_embedding_check(u, 3, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(sobolev_embedding_check(u, 0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(sobolev_embedding_check(u, 5, 2.0), std::invalid_argument);

  std::vector<Axis> two{{0, 1, 8}, {0, 1, 8}, {0, 1, 5}};
  GridField v(two);
  v.values().setZero();
  CHECK_NOTHROW(sobolev_embedding_check(v, 2, 8.0));
}

TEST_CASE("truncation inequality handles vanishing, ramp and constant data") {
  const HarnackGeometry geom;

  std::vector<Axis> ext_axes{{-2.5, 2.5, 41}, {-10.0, 10.0, 41}, {-1.25, 0.0, 33}};
  GridField zero(ext_axes);
  zero.values().setZero();
  const PoincareReport zr = weak_poincare_check(zero, geom, {}, 1024);
  CHECK(zr.lhs == 0.0);
  CHECK(zr.cp == 0.0);

  const GridField ramp = GridField::sample(
      ext_axes, [](const Eigen::VectorXd& p) { return std::max(p(0), 0.0); });
  const PoincareReport rr = weak_poincare_check(ramp, geom, {}, 2048);
  CHECK(rr.zero_fraction >= 0.25);
  CHECK(rr.theta > 0.0);
  CHECK(rr.theta < 1.0);
  CHECK(rr.grad_norm > 0.0);
  CHECK(rr.dual_norm == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::isfinite(rr.cp));
  CHECK(rr.cp > 0.0);
  CHECK(rr.lhs <= rr.cp * rr.rhs * (1.0 + 1e-12));

  GridField flat(ext_axes);
  flat.values().setConstant(2.0);
  CHECK_THROWS_AS(weak_poincare_check(flat, geom, {}, 1024), std::domain_error);

  CHECK_THROWS_AS(weak_poincare_check(ramp, geom, {1.5}, 256), std::invalid_argument);
}

TEST_CASE("checkerboard battery stays finite with mild refinement drift") {
  BatterySettings s;
  s.ns = 64;
  s.seed = 7;
  s.lattice_points = 2048;
  const BatteryRunReport rep = battery_run(s);

  CHECK(std::isfinite(rep.base.moser));
  CHECK(rep.base.moser > 0.0);
  CHECK(std::isfinite(rep.base.harnack));
  CHECK(rep.base.harnack >= 1.0);
  CHECK(std::isfinite(rep.base.weak_harnack));
  CHECK(rep.base.holder_alpha > 0.0);
  CHECK(rep.base.holder_alpha <= 1.0);
  CHECK(std::isfinite(rep.base.poincare_cp));

  CHECK(rep.drift.moser <= 0.2);
  CHECK(rep.drift.harnack <= 0.2);
  CHECK(rep.drift.weak_harnack <= 0.2);
  CHECK(rep.drift.holder_alpha <= 0.2);
  CHECK(rep.drift.poincare_cp <= 0.2);
  MESSAGE("drift moser ", rep.drift.moser, " harnack ", rep.drift.harnack,
          " weak ", rep.drift.weak_harnack, " holder ", rep.drift.holder_alpha,
          " poincare ", rep.drift.poincare_cp);

  BatterySettings bad = s;
  bad.lambda = -1.0;
  CHECK_THROWS_AS(battery_run(bad), std::invalid_argument);
}

TEST_CASE("fitted constants do not improve as the contrast grows") {
  std::vector<double> level, mos_fit, har_fit;
  for (double contrast : {1.0, 2.5, 6.3, 16.0}) {
    double mc = 0.0, hc = 0.0;
    for (unsigned seed : {11u, 12u, 13u, 14u, 15u}) {
      BatterySettings s;
      s.ns = 48;
      s.lambda = 1.0 / contrast;
      s.seed = seed;
      s.lattice_points = 1024;
      const BatteryChecks c = battery_checks_at(s, s.ns);
      mc = std::max(mc, c.moser);
      hc = std::max(hc, c.harnack);
    }
    level.push_back(contrast);
    mos_fit.push_back(mc);
    har_fit.push_back(hc);
  }
  CHECK(spearman(level, mos_fit) >= 0.0);
  CHECK(spearman(level, har_fit) >= 0.0);
  MESSAGE("family moser ", mos_fit[0], " ", mos_fit[1], " ", mos_fit[2], " ",
          mos_fit[3], ", family harnack ", har_fit[0], " ", har_fit[1], " ",
          har_fit[2], " ", har_fit[3]);
}
