/**
 * @file prng.hpp
 * @brief Seedable generator with portable derived draws.
 *
 * std::mt19937_64 itself is specified bit-for-bit, but the standard
 * distributions on top of it are not: libstdc++ and libc++ may consume the
 * stream differently. Synthetic corpora must replay byte-identically from a
 * seed on any platform, so every derived draw (units, bounded ints, shuffles,
 * samples) is spelled out here instead of using <random> distributions.
 */

#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "rankbias/error.hpp"

namespace rankbias {

class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1): top 53 bits scaled by 2^-53.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection, so every value is equally
  /// likely regardless of bound.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw InvalidParams("uniform_below: empty range");
    // (2^64 - bound) mod bound == 2^64 mod bound; reject draws beneath it.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  /// Uniform integer in [lo, hi], both ends included.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw InvalidParams("uniform_int: lo > hi");
    const auto span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == std::numeric_limits<std::uint64_t>::max()) {
      return static_cast<std::int64_t>(engine_());
    }
    return lo + static_cast<std::int64_t>(uniform_below(span + 1));
  }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform_below(n));
  }

  /// Fisher-Yates, explicit rather than std::shuffle for the same
  /// reproducibility reason as above.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      using std::swap;
      swap(values[i - 1], values[uniform_index(i)]);
    }
  }

  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    if (k > n) throw InvalidParams("sample_indices: k exceeds population");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + uniform_index(n - i);
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rankbias
