#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "dendrolab/rational.hpp"

namespace dendrolab {

/// Seeded generator with platform-independent bounded draws.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    if (n == 0) throw PreconditionError("empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi)
  {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Rational k/den with k uniform in [lo_num, hi_num].
  Rational fraction(std::int64_t lo_num, std::int64_t hi_num, std::int64_t den)
  {
    return Rational(between(lo_num, hi_num), den);
  }

  bool coin() { return below(2) == 1; }

  /// Fisher-Yates with the bounded draws above.
  template <class T>
  void shuffle(std::vector<T>& v)
  {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace dendrolab
