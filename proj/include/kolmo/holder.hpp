#pragma once

#include <kolmo/fields.hpp>
#include <kolmo/norms.hpp>
#include <kolmo/rng.hpp>

#include <stdexcept>

namespace kolmo {

// Empirical seminorm sup |u(z) - u(w)| / d(z, w)^alpha over sampled node
// pairs of a space-time grid (axes: N spatial, then time). A lower bound of
// the true seminorm that stabilizes as the pair budget grows.
inline double holder_seminorm(const LieStructure& S, const GridField& u, double alpha,
                              std::int64_t n_pairs, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("holder exponent must lie in (0, 1]");
  if (u.dim() != S.N() + 1)
    throw std::invalid_argument("field must have N spatial axes plus time");
  const CounterRng rng(seed);
  const Eigen::Index sz = u.size();
  if (sz < 2) return 0.0;
  double best = 0.0;
  Eigen::VectorXd pa, pb;
  for (std::int64_t k = 0; k < n_pairs; ++k) {
    const Eigen::Index ia = static_cast<Eigen::Index>(rng.raw(k, 0, 0) % sz);
    Eigen::Index ib = static_cast<Eigen::Index>(rng.raw(k, 0, 1) % sz);
    if (ib == ia) ib = (ib + 1) % sz;
    u.coords(ia, pa);
    u.coords(ib, pb);
    const GroupPoint za{pa.head(S.N()), pa(S.N())};
    const GroupPoint zb{pb.head(S.N()), pb(S.N())};
    const double d = distance(S, za, zb);
    if (d <= 0.0) continue;
    const double ratio = std::abs(u.values()(ia) - u.values()(ib)) / std::pow(d, alpha);
    if (ratio > best) best = ratio;
  }
  return best;
}

}  // namespace kolmo
