#include <kolmo/relativity.hpp>

#include <cmath>
#include <stdexcept>

namespace kolmo {

double lorentz_gamma(const Eigen::VectorXd& p) { return std::sqrt(1.0 + p.squaredNorm()); }

Eigen::MatrixXd relativistic_sigma(const Eigen::VectorXd& p) {
  const int n = static_cast<int>(p.size());
  const double gamma = lorentz_gamma(p);
  return Eigen::MatrixXd::Identity(n, n) + (p * p.transpose()) / (1.0 + gamma);
}

RelPoint compose_lorentz(const RelPoint& a, const RelPoint& b) {
  if (a.p.size() != b.p.size() || a.x.size() != b.x.size() || a.p.size() != a.x.size())
    throw std::invalid_argument("boost composition needs matching dimensions");
  const double ga = lorentz_gamma(a.p);
  const double gb = lorentz_gamma(b.p);
  RelPoint out;
  out.p = b.p + (gb + a.p.dot(b.p) / (1.0 + ga)) * a.p;
  out.x = b.x + a.x + (b.t + a.p.dot(b.x) / (1.0 + ga)) * a.p;
  out.t = a.t + ga * b.t + a.p.dot(b.x);
  return out;
}

RelPoint inverse_lorentz(const RelPoint& a) {
  const double ga = lorentz_gamma(a.p);
  const double px = a.p.dot(a.x);
  RelPoint out;
  out.p = -a.p;
  out.t = px - ga * a.t;
  out.x = -a.x - (px / (1.0 + ga) - a.t) * a.p;
  return out;
}

}  // namespace kolmo
