#include <kolmo/covariance.hpp>
#include <kolmo/rng.hpp>
#include <kolmo/sde.hpp>

#include <cmath>
#include <stdexcept>

namespace kolmo {

namespace {

std::vector<int> recorded_steps(const EnsembleConfig& cfg) {
  std::vector<int> idx;
  idx.push_back(0);
  if (cfg.record_every > 0)
    for (int k = cfg.record_every; k < cfg.n_steps; k += cfg.record_every) idx.push_back(k);
  if (cfg.n_steps > 0) idx.push_back(cfg.n_steps);
  return idx;
}

bool bad_state(const Eigen::VectorXd& s) {
  return !s.allFinite() || s.cwiseAbs().maxCoeff() > 1e10;
}

// Shared Euler driver. The stepper advances one path by one step using the
// per step Gaussian draws it pulls from the counter generator.
template <typename Stepper>
PathEnsemble run_ensemble(int dim, const EnsembleConfig& cfg, Stepper&& step) {
  if (cfg.n_paths < 1 || cfg.n_steps < 1 || !(cfg.dt > 0.0))
    throw std::invalid_argument("ensemble needs positive path count, step count and dt");
  PathEnsemble out;
  out.config = cfg;
  out.dim = dim;
  const std::vector<int> rec = recorded_steps(cfg);
  for (int j : rec) out.times.push_back(cfg.dt * j);
  out.snaps.assign(rec.size(), Eigen::MatrixXd::Zero(cfg.n_paths, dim));
  const CounterRng rng(cfg.seed);
  Eigen::VectorXd state(dim);
  for (int p = 0; p < cfg.n_paths; ++p) {
    state.setZero();
    std::size_t next = 0;
    for (int k = 0; k <= cfg.n_steps; ++k) {
      if (next < rec.size() && rec[next] == k) {
        out.snaps[next].row(p) = state.transpose();
        ++next;
      }
      if (k == cfg.n_steps) break;
      step(rng, p, k, state);
    }
    if (bad_state(state)) out.blew_up = true;
  }
  return out;
}

}  // namespace

void stream_group_drift(const LieStructure& S, const Eigen::MatrixXd& A0,
                        const EnsembleConfig& cfg, const PathCallback& cb, bool* blew_up) {
  const int N = S.N();
  const int m0 = S.m0();
  check_diffusion_block(A0, m0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(2.0 * A0);
  const Eigen::MatrixXd sigma = es.operatorSqrt();
  const Eigen::MatrixXd B = S.B();
  const double sq_dt = std::sqrt(cfg.dt);
  const std::vector<int> rec = recorded_steps(cfg);
  const CounterRng rng(cfg.seed);
  if (blew_up) *blew_up = false;
  Eigen::VectorXd state(N), xi(m0);
  for (int p = 0; p < cfg.n_paths; ++p) {
    state.setZero();
    std::size_t next = 0;
    for (int k = 0; k <= cfg.n_steps; ++k) {
      if (next < rec.size() && rec[next] == k) {
        cb(p, static_cast<int>(next), cfg.dt * k, state);
        ++next;
      }
      if (k == cfg.n_steps) break;
      for (int i = 0; i < m0; ++i) xi(i) = rng.normal(p, k, i);
      state -= cfg.dt * (B * state);
      state.head(m0) += sq_dt * (sigma * xi);
    }
    if (blew_up && bad_state(state)) *blew_up = true;
  }
}

PathEnsemble simulate_group_drift(const LieStructure& S, const Eigen::MatrixXd& A0,
                                  const EnsembleConfig& cfg) {
  const int N = S.N();
  const int m0 = S.m0();
  check_diffusion_block(A0, m0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(2.0 * A0);
  const Eigen::MatrixXd sigma = es.operatorSqrt();
  const Eigen::MatrixXd B = S.B();
  const double sq_dt = std::sqrt(cfg.dt);
  Eigen::VectorXd xi(m0);
  return run_ensemble(N, cfg, [&](const CounterRng& rng, int p, int k, Eigen::VectorXd& s) {
    for (int i = 0; i < m0; ++i) xi(i) = rng.normal(p, k, i);
    s -= cfg.dt * (B * s);
    s.head(m0) += sq_dt * (sigma * xi);
  });
}

PathEnsemble simulate_langevin(int n, const Eigen::MatrixXd& A0, const EnsembleConfig& cfg) {
  check_diffusion_block(A0, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(2.0 * A0);
  const Eigen::MatrixXd sigma = es.operatorSqrt();
  const double sq_dt = std::sqrt(cfg.dt);
  Eigen::VectorXd xi(n);
  return run_ensemble(2 * n, cfg, [&](const CounterRng& rng, int p, int k, Eigen::VectorXd& s) {
    for (int i = 0; i < n; ++i) xi(i) = rng.normal(p, k, i);
    s.tail(n) += cfg.dt * s.head(n);
    s.head(n) += sq_dt * (sigma * xi);
  });
}

PathEnsemble simulate_relativistic(int n, const EnsembleConfig& cfg) {
  const double sq_2dt = std::sqrt(2.0 * cfg.dt);
  Eigen::VectorXd xi(n);
  return run_ensemble(2 * n + 1, cfg, [&](const CounterRng& rng, int p, int k,
                                          Eigen::VectorXd& s) {
    for (int i = 0; i < n; ++i) xi(i) = rng.normal(p, k, i);
    const Eigen::VectorXd mom = s.head(n);
    const double gamma = std::sqrt(1.0 + mom.squaredNorm());
    s.segment(n, n) += cfg.dt * mom;
    s(2 * n) += cfg.dt * gamma;
    s.head(n) += sq_2dt * (xi + mom * (mom.dot(xi) / (1.0 + gamma)));
  });
}

KdeReport kde_l1_vs_density(const Eigen::MatrixXd& points,
                            const std::function<double(const Eigen::VectorXd&)>& density,
                            const KdeOptions& opts) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (d != 2) throw std::invalid_argument("density comparison is implemented for two columns");
  if (n < 100) throw std::invalid_argument("density comparison needs at least 100 samples");

  const Eigen::RowVector2d mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  const Eigen::Matrix2d cov = centered.transpose() * centered / (n - 1);
  Eigen::Matrix2d T;   // transform into unit scale coordinates
  if (opts.whiten) {
    T = Eigen::LLT<Eigen::Matrix2d>(cov).matrixL();
  } else {
    T.setZero();
    T(0, 0) = std::sqrt(cov(0, 0));
    T(1, 1) = std::sqrt(cov(1, 1));
  }
  const double detT = T(0, 0) * T(1, 1);
  const Eigen::MatrixXd U =
      T.triangularView<Eigen::Lower>().solve(centered.transpose()).transpose();

  const int nb = opts.bins;
  const double hw = opts.half_width;
  const double cell = 2.0 * hw / nb;
  // Silverman factor in two dimensions is one, kept in general form.
  const double h = std::pow(4.0 / (d + 2.0), 1.0 / (d + 4.0)) * std::pow(n, -1.0 / (d + 4.0));

  Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(nb, nb);
  long lost = 0;
  for (int i = 0; i < n; ++i) {
    const double a = (U(i, 0) + hw) / cell - 0.5;
    const double b = (U(i, 1) + hw) / cell - 0.5;
    const int ia = static_cast<int>(std::floor(a));
    const int ib = static_cast<int>(std::floor(b));
    if (ia < 0 || ib < 0 || ia + 1 >= nb || ib + 1 >= nb) {
      ++lost;
      continue;
    }
    const double fa = a - ia, fb = b - ib;
    hist(ia, ib) += (1.0 - fa) * (1.0 - fb);
    hist(ia + 1, ib) += fa * (1.0 - fb);
    hist(ia, ib + 1) += (1.0 - fa) * fb;
    hist(ia + 1, ib + 1) += fa * fb;
  }

  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * h / cell)));
  Eigen::VectorXd kern(2 * radius + 1);
  for (int j = -radius; j <= radius; ++j)
    kern(j + radius) = std::exp(-0.5 * std::pow(j * cell / h, 2));
  kern /= kern.sum();

  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(nb, nb);
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < nb; ++c) {
      const double v = hist(r, c);
      if (v == 0.0) continue;
      for (int j = std::max(0, r - radius); j <= std::min(nb - 1, r + radius); ++j)
        tmp(j, c) += v * kern(j - r + radius);
    }
  Eigen::MatrixXd blur = Eigen::MatrixXd::Zero(nb, nb);
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < nb; ++c) {
      const double v = tmp(r, c);
      if (v == 0.0) continue;
      for (int j = std::max(0, c - radius); j <= std::min(nb - 1, c + radius); ++j)
        blur(r, j) += v * kern(j - c + radius);
    }

  double l1 = 0.0;
  Eigen::Vector2d u, z;
  for (int r = 0; r < nb; ++r)
    for (int c = 0; c < nb; ++c) {
      u(0) = -hw + (r + 0.5) * cell;
      u(1) = -hw + (c + 0.5) * cell;
      z = mean.transpose() + T * u;
      const double est = blur(r, c) / (n * cell * cell);
      const double ref = density(z) * detT;
      l1 += std::abs(est - ref) * cell * cell;
    }

  KdeReport rep;
  rep.l1_error = l1;
  rep.bandwidth = h;
  rep.lost_fraction = static_cast<double>(lost) / n;
  rep.bins = nb;
  return rep;
}

}  // namespace kolmo
