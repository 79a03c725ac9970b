#pragma once

#include <cmath>
#include <cstdint>

namespace kolmo {

// Stateless counter-based generator: every variate is a pure function of
// (seed, stream, step, slot), so ensembles are bit-exact for any thread count
// or evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  static std::uint64_t scramble(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t raw(std::uint64_t stream, std::uint64_t step, std::uint64_t slot) const {
    std::uint64_t h = scramble(seed_ ^ 0x6a09e667f3bcc909ULL);
    h = scramble(h ^ (stream + 0xbb67ae8584caa73bULL));
    h = scramble(h ^ (step + 0x3c6ef372fe94f82bULL));
    h = scramble(h ^ (slot + 0xa54ff53a5f1d36f1ULL));
    return h;
  }

  // Uniform on (0, 1), never returning an endpoint.
  double uniform(std::uint64_t stream, std::uint64_t step, std::uint64_t slot) const {
    return (raw(stream, step, slot) >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double uniform(std::uint64_t stream, std::uint64_t step, std::uint64_t slot,
                 double lo, double hi) const {
    return lo + (hi - lo) * uniform(stream, step, slot);
  }

  // Standard normal via Box-Muller; slot k consumes the uniform pair (2k, 2k+1).
  double normal(std::uint64_t stream, std::uint64_t step, std::uint64_t slot) const {
    const double u1 = uniform(stream, step, 2 * slot);
    const double u2 = uniform(stream, step, 2 * slot + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace kolmo
