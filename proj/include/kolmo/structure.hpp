#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kolmo {

// Drift matrix in block canonical form: an N x N matrix vanishing everywhere
// except for full-rank blocks on the first sub-diagonal, with nonincreasing
// block heights m[0] >= m[1] >= ... >= m[kappa] >= 1.
struct BlockStructure {
  int kappa = 0;
  std::vector<int> m;
  std::vector<Eigen::MatrixXd> blocks;  // blocks[j-1] has shape m[j] x m[j-1]
  int N = 0;

  // Kinetic structure on R^n x R^n: kappa = 1, m = {n, n}, unit sub-block.
  static BlockStructure kinetic(int n);
  // Purely diffusive structure: kappa = 0, no drift blocks.
  static BlockStructure parabolic(int m0);

  Eigen::MatrixXd assemble() const;
};

// Throws std::invalid_argument when the block data violate the canonical form.
void validate(const BlockStructure& b);

// Block structure plus the derived dilation data used by every geometric
// operation: exponents alpha_i = 2j+1 on block j and the spatial homogeneous
// dimension Q = sum_i alpha_i (space-time dimension Q + 2).
class LieStructure {
 public:
  explicit LieStructure(BlockStructure b);

  static LieStructure kinetic(int n) { return LieStructure(BlockStructure::kinetic(n)); }
  static LieStructure parabolic(int m0) { return LieStructure(BlockStructure::parabolic(m0)); }

  const BlockStructure& blocks() const { return blocks_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::VectorXi& alpha() const { return alpha_; }
  int N() const { return blocks_.N; }
  int m0() const { return blocks_.m[0]; }
  int kappa() const { return blocks_.kappa; }
  int Q() const { return Q_; }

 private:
  BlockStructure blocks_;
  Eigen::MatrixXd B_;
  Eigen::VectorXi alpha_;
  int Q_ = 0;
};

}  // namespace kolmo
