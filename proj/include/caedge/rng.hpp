#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace caedge {

/// Seeded random source shared by every stochastic operator.
///
/// The standard distributions are implementation-defined, so bounded integers
/// and unit floats are derived here from the raw 64-bit engine output. This
/// keeps population files and stats identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::size_t below(std::size_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t b = bound;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % b;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % b);
  }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// `count` distinct values drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t count) {
    if (count > n) throw std::invalid_argument("Rng::sample: count exceeds population");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + below(n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
  }

  /// Two distinct values from [0, n).
  std::pair<std::size_t, std::size_t> distinct_pair(std::size_t n) {
    if (n < 2) throw std::invalid_argument("Rng::distinct_pair: need at least two values");
    const std::size_t a = below(n);
    std::size_t b = below(n - 1);
    if (b >= a) ++b;
    return {a, b};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace caedge
