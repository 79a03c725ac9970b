#pragma once

#include <kolmo/structure.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace kolmo {

struct EnsembleConfig {
  int n_paths = 1000;
  int n_steps = 1000;
  double dt = 1e-3;
  int record_every = 0;   // 0 records only the initial and final states
  std::uint64_t seed = 1;
};

// Snapshot storage for a path ensemble. Full per step trajectories are not
// kept; callers needing them stream paths one at a time instead.
struct PathEnsemble {
  EnsembleConfig config;
  int dim = 0;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> snaps;   // one n_paths by dim matrix per time
  bool blew_up = false;                 // some state exceeded 1e10 or went non finite
};

// Called once per recorded step of one path, in path major order.
using PathCallback =
    std::function<void(int path, int snap, double time, const Eigen::VectorXd& state)>;

// Linear drift ensemble whose exact law at time t is the fundamental solution
// slice, so moments match twice the covariance polynomial entrywise.
PathEnsemble simulate_group_drift(const LieStructure& S, const Eigen::MatrixXd& A0,
                                  const EnsembleConfig& cfg);
void stream_group_drift(const LieStructure& S, const Eigen::MatrixXd& A0,
                        const EnsembleConfig& cfg, const PathCallback& cb, bool* blew_up);

// Frictionless kinetic pair (velocity, position) with position driven forward
// by the velocity. Its law is the space reflected kernel.
PathEnsemble simulate_langevin(int n, const Eigen::MatrixXd& A0, const EnsembleConfig& cfg);

// Momentum, position and coordinate time for the relativistic kinetic model.
// State is (P, X, T) with the diffusion acting on momentum only.
PathEnsemble simulate_relativistic(int n, const EnsembleConfig& cfg);

struct KdeOptions {
  int bins = 512;
  double half_width = 8.0;   // box half width in whitened standard deviations
  bool whiten = true;        // full whitening; otherwise only per axis scaling
};

struct KdeReport {
  double l1_error = 0.0;
  double bandwidth = 0.0;
  double lost_fraction = 0.0;   // sample mass falling outside the estimation box
  int bins = 0;
};

// Binned product Gaussian density estimate of two dimensional samples against
// a reference density, integrated L1 gap over the estimation box.
KdeReport kde_l1_vs_density(const Eigen::MatrixXd& points,
                            const std::function<double(const Eigen::VectorXd&)>& density,
                            const KdeOptions& opts = {});

}  // namespace kolmo
