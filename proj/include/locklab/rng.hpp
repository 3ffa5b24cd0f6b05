#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace locklab {

/// Seeded random source used by every randomized operation.
///
/// Wraps mt19937_64 and draws bounded integers by rejection so the sequence is
/// identical on every standard library (the std distributions are not).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// True with probability numerator/denominator.
  bool chance(std::uint64_t numerator, std::uint64_t denominator) {
    return below(denominator) < numerator;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  /// `count` distinct elements of `items` in random order.
  template <typename T>
  std::vector<T> sample(std::vector<T> items, std::size_t count) {
    for (std::size_t i = 0; i < count && i < items.size(); ++i) {
      std::swap(items[i], items[i + below(items.size() - i)]);
    }
    items.resize(std::min(count, items.size()));
    return items;
  }

  /// Child generator for an independent sub-task.
  Rng fork() { return Rng(engine_()); }

private:
  std::mt19937_64 engine_;
};

}  // namespace locklab
