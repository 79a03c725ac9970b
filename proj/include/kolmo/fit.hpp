#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kolmo {

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope fit needs matching samples, at least two");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Convergence order fitted from residuals at geometrically shrinking scales:
// slope of log residual against log scale.
inline double fit_order(const std::vector<double>& h, const std::vector<double>& r) {
  std::vector<double> lx(h.size()), ly(r.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    lx[i] = std::log(h[i]);
    ly[i] = std::log(r[i]);
  }
  return fit_slope(lx, ly);
}

}  // namespace kolmo
