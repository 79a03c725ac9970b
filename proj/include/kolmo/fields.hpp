#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace kolmo {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;

  double h() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
  double coord(int i) const { return n > 1 ? lo + i * h() : 0.5 * (lo + hi); }
};

// Dense tensor-product grid sample of a scalar field. Integration uses
// trapezoid weights per axis; a single-node axis acts as a unit-weight
// section, so slabs and lower-dimensional fields share the same interface.
class GridField {
 public:
  GridField() = default;

  explicit GridField(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw std::invalid_argument("grid needs at least one axis");
    strides_.assign(axes_.size(), 1);
    Eigen::Index sz = 1;
    for (int d = static_cast<int>(axes_.size()) - 1; d >= 0; --d) {
      if (axes_[d].n < 1) throw std::invalid_argument("axis needs at least one node");
      strides_[d] = sz;
      sz *= axes_[d].n;
    }
    v_ = Eigen::VectorXd::Zero(sz);
  }

  static GridField sample(std::vector<Axis> axes,
                          const std::function<double(const Eigen::VectorXd&)>& fn) {
    GridField g(std::move(axes));
    Eigen::VectorXd p(g.dim());
    for (Eigen::Index f = 0; f < g.size(); ++f) {
      g.coords(f, p);
      g.v_(f) = fn(p);
    }
    return g;
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int d) const { return axes_[d]; }
  const std::vector<Axis>& axes() const { return axes_; }
  Eigen::Index size() const { return v_.size(); }
  Eigen::VectorXd& values() { return v_; }
  const Eigen::VectorXd& values() const { return v_; }

  Eigen::Index flat(const std::vector<int>& idx) const {
    Eigen::Index f = 0;
    for (std::size_t d = 0; d < axes_.size(); ++d) f += idx[d] * strides_[d];
    return f;
  }

  void unflatten(Eigen::Index f, std::vector<int>& idx) const {
    idx.resize(axes_.size());
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      idx[d] = static_cast<int>(f / strides_[d]);
      f %= strides_[d];
    }
  }

  void coords(Eigen::Index f, Eigen::VectorXd& p) const {
    p.resize(dim());
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      const int i = static_cast<int>(f / strides_[d]);
      f %= strides_[d];
      p(d) = axes_[d].coord(i);
    }
  }

  double& at(const std::vector<int>& idx) { return v_(flat(idx)); }
  double at(const std::vector<int>& idx) const { return v_(flat(idx)); }

  // Tensor trapezoid weight of the node with flat index f.
  double weight(Eigen::Index f) const {
    double w = 1.0;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
      const int i = static_cast<int>(f / strides_[d]);
      f %= strides_[d];
      const Axis& a = axes_[d];
      if (a.n > 1) w *= a.h() * ((i == 0 || i == a.n - 1) ? 0.5 : 1.0);
    }
    return w;
  }

  double integral() const {
    double s = 0.0;
    for (Eigen::Index f = 0; f < size(); ++f) s += weight(f) * v_(f);
    return s;
  }

  // Multilinear interpolation, clamped to the grid box.
  double interp(const Eigen::VectorXd& p) const {
    const int d = dim();
    std::vector<int> base(d);
    std::vector<double> frac(d);
    for (int k = 0; k < d; ++k) {
      const Axis& a = axes_[k];
      if (a.n == 1) {
        base[k] = 0;
        frac[k] = 0.0;
        continue;
      }
      double u = (p(k) - a.lo) / a.h();
      if (u < 0.0) u = 0.0;
      if (u > a.n - 1) u = a.n - 1;
      int i = static_cast<int>(u);
      if (i > a.n - 2) i = a.n - 2;
      base[k] = i;
      frac[k] = u - i;
    }
    double acc = 0.0;
    const int corners = 1 << d;
    std::vector<int> idx(d);
    for (int c = 0; c < corners; ++c) {
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        const bool hi = (c >> k) & 1;
        if (hi && axes_[k].n == 1) { w = 0.0; break; }
        w *= hi ? frac[k] : 1.0 - frac[k];
        idx[k] = base[k] + (hi ? 1 : 0);
      }
      if (w != 0.0) acc += w * at(idx);
    }
    return acc;
  }

 private:
  std::vector<Axis> axes_;
  std::vector<Eigen::Index> strides_;
  Eigen::VectorXd v_;
};

// Van der Corput radical inverse; bases should be distinct small primes.
inline double halton(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  ++i;  // skip the origin
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

inline const int* halton_primes() {
  static const int p[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  return p;
}

}  // namespace kolmo
