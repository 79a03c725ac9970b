#include <kolmo/structure.hpp>

#include <numeric>
#include <stdexcept>
#include <string>

namespace kolmo {

BlockStructure BlockStructure::kinetic(int n) {
  if (n < 1) throw std::invalid_argument("kinetic structure needs n >= 1");
  BlockStructure b;
  b.kappa = 1;
  b.m = {n, n};
  b.blocks = {Eigen::MatrixXd::Identity(n, n)};
  b.N = 2 * n;
  return b;
}

BlockStructure BlockStructure::parabolic(int m0) {
  if (m0 < 1) throw std::invalid_argument("parabolic structure needs m0 >= 1");
  BlockStructure b;
  b.kappa = 0;
  b.m = {m0};
  b.N = m0;
  return b;
}

Eigen::MatrixXd BlockStructure::assemble() const {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
  int row = m[0];
  int col = 0;
  for (int j = 1; j <= kappa; ++j) {
    B.block(row, col, m[j], m[j - 1]) = blocks[j - 1];
    col += m[j - 1];
    row += m[j];
  }
  return B;
}

void validate(const BlockStructure& b) {
  if (b.kappa < 0) throw std::invalid_argument("kappa must be nonnegative");
  if (static_cast<int>(b.m.size()) != b.kappa + 1)
    throw std::invalid_argument("expected kappa+1 block heights");
  if (static_cast<int>(b.blocks.size()) != b.kappa)
    throw std::invalid_argument("expected kappa sub-diagonal blocks");
  for (int j = 0; j <= b.kappa; ++j) {
    if (b.m[j] < 1) throw std::invalid_argument("block heights must be >= 1");
    if (j > 0 && b.m[j] > b.m[j - 1])
      throw std::invalid_argument("block heights must be nonincreasing");
  }
  if (std::accumulate(b.m.begin(), b.m.end(), 0) != b.N)
    throw std::invalid_argument("block heights must sum to N");
  for (int j = 1; j <= b.kappa; ++j) {
    const Eigen::MatrixXd& Bj = b.blocks[j - 1];
    if (Bj.rows() != b.m[j] || Bj.cols() != b.m[j - 1])
      throw std::invalid_argument("block " + std::to_string(j) + " has wrong shape");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Bj);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(sv.size() - 1) <= 1e-10 * sv(0))
      throw std::invalid_argument("block " + std::to_string(j) + " is rank deficient");
  }
}

LieStructure::LieStructure(BlockStructure b) : blocks_(std::move(b)) {
  validate(blocks_);
  B_ = blocks_.assemble();
  alpha_.resize(blocks_.N);
  int i = 0;
  for (int j = 0; j <= blocks_.kappa; ++j)
    for (int k = 0; k < blocks_.m[j]; ++k) alpha_(i++) = 2 * j + 1;
  Q_ = alpha_.sum();
}

}  // namespace kolmo
