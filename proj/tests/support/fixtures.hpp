#pragma once

#include <memory>

#include "dendrolab/subdendrite.hpp"

namespace fixtures {

using namespace dendrolab;

// a=0, b=1, c=2, d=3; b is the order-3 hub.
inline std::shared_ptr<const Dendrite> y3()
{
  return std::make_shared<const Dendrite>(
      std::vector<Order>{Order(1), Order(3), Order(1), Order(1)},
      std::vector<Dendrite::Edge>{{0, 1, Rational(1)}, {1, 2, Rational(1)}, {1, 3, Rational(1)}});
}

inline constexpr NodeId A = 0, B = 1, C = 2, D = 3;

inline Point n(NodeId v) { return Point::node(v); }

inline Rational q(long a, long b = 1) { return Rational(a, b); }

} // namespace fixtures
