#include <kolmo/sobolev.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {

double trapezoid_weight(const Axis& ax, int i) {
  if (ax.n < 2) return 1.0;
  return ax.h() * ((i == 0 || i == ax.n - 1) ? 0.5 : 1.0);
}

struct MeanPass {
  std::vector<double> means;    // averaged block mean per leading node
  std::vector<double> weights;  // full trapezoid weight per leading node
  double inner = 0.0;           // averaged squared leading gradient, integrated
};

void check_exponent(int m0, double q) {
  if (!(q >= 2.0))
    throw std::invalid_argument("embedding exponent must be at least two");
  if (m0 > 2 && q > 2.0 * m0 / (m0 - 2) + 1e-12)
    throw std::invalid_argument("embedding exponent exceeds the critical value");
}

MeanPass reduce_field(const GridField& u, int m0) {
  const int d = u.dim();
  if (m0 < 1 || m0 >= d)
    throw std::invalid_argument(
        "leading block must keep at least one axis on each side");

  Eigen::Index lead_size = 1, rest_size = 1;
  for (int a = 0; a < m0; ++a) lead_size *= u.axis(a).n;
  for (int a = m0; a < d; ++a) rest_size *= u.axis(a).n;

  std::vector<double> wr(rest_size, 1.0);
  for (Eigen::Index f = 0; f < rest_size; ++f) {
    Eigen::Index rem = f;
    for (int a = d - 1; a >= m0; --a) {
      const int i = static_cast<int>(rem % u.axis(a).n);
      rem /= u.axis(a).n;
      wr[f] *= trapezoid_weight(u.axis(a), i);
    }
  }
  double vol_rest = 0.0;
  for (double w : wr) vol_rest += w;
  if (!(vol_rest > 0.0)) throw std::invalid_argument("averaged block has no volume");
  const Eigen::Map<const Eigen::VectorXd> wrv(wr.data(), rest_size);

  std::vector<Eigen::Index> lead_stride(m0, 1);
  for (int a = m0 - 2; a >= 0; --a)
    lead_stride[a] = lead_stride[a + 1] * u.axis(a + 1).n;
  const auto lead_index = [&](Eigen::Index lf, int a) {
    return static_cast<int>(lf / lead_stride[a] % u.axis(a).n);
  };
  const auto lead_weight_excluding = [&](Eigen::Index lf, int skip) {
    double w = 1.0;
    for (int a = 0; a < m0; ++a)
      if (a != skip) w *= trapezoid_weight(u.axis(a), lead_index(lf, a));
    return w;
  };

  MeanPass pass;
  pass.means.resize(lead_size);
  pass.weights.resize(lead_size);
  for (Eigen::Index lf = 0; lf < lead_size; ++lf) {
    const auto block = u.values().segment(lf * rest_size, rest_size);
    pass.means[lf] = wrv.dot(block) / vol_rest;
    pass.weights[lf] = lead_weight_excluding(lf, -1);

    for (int a = 0; a < m0; ++a) {
      if (lead_index(lf, a) + 1 >= u.axis(a).n) continue;
      const auto ahead =
          u.values().segment((lf + lead_stride[a]) * rest_size, rest_size);
      const double h = u.axis(a).h();
      const double grad_sq = ((ahead - block) / h).cwiseAbs2().dot(wrv);
      pass.inner += h * lead_weight_excluding(lf, a) * grad_sq / vol_rest;
    }
  }
  return pass;
}

SobolevReport assemble(const MeanPass& pass, double q) {
  SobolevReport rep;
  for (std::size_t lf = 0; lf < pass.means.size(); ++lf)
    rep.lhs += pass.weights[lf] * std::pow(std::abs(pass.means[lf]), q);
  rep.rhs = std::pow(pass.inner, 0.5 * q);
  return rep;
}

}  // namespace

SobolevReport sobolev_embedding_check(const GridField& u, int m0, double q) {
  check_exponent(m0, q);
  return assemble(reduce_field(u, m0), q);
}

std::vector<SobolevReport> sobolev_embedding_multi(const GridField& u, int m0,
                                                   const std::vector<double>& qs) {
  for (double q : qs) check_exponent(m0, q);
  const MeanPass pass = reduce_field(u, m0);
  std::vector<SobolevReport> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(assemble(pass, q));
  return out;
}

}  // namespace kolmo
