#pragma once

#include <kolmo/fields.hpp>

#include <vector>

namespace kolmo {

struct SobolevReport {
  double lhs = 0.0;  // integral over the leading block of |mean of u|^q
  double rhs = 0.0;  // (integral of the mean squared leading gradient)^(q/2)
};

// Embedding check on a product grid whose first m0 axes span the diffused
// block and whose remaining axes are averaged out. The leading gradient is
// taken by forward differences, so separable trigonometric fields admit an
// exact closed form for both sides. For m0 > 2 the exponent must lie in
// [2, 2 m0/(m0-2)]; for m0 <= 2 any q >= 2 is allowed.
SobolevReport sobolev_embedding_check(const GridField& u, int m0, double q);

// Same check for several exponents sharing one pass over the field.
std::vector<SobolevReport> sobolev_embedding_multi(const GridField& u, int m0,
                                                   const std::vector<double>& qs);

}  // namespace kolmo
