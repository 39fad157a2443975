#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace humor {

// splitmix64 finalizer; used to derive child seeds from a master seed.
uint64_t splitmix64(uint64_t x);

// The fixed mixing function for deriving per-tree / per-fold / per-example
// seeds from a master seed and an index. Stable across platforms.
uint64_t mix_seed(uint64_t seed, uint64_t index);

// Deterministic random source. mt19937_64 output is fully specified by the
// standard, and all derived draws below avoid implementation-defined
// distributions, so identical seeds give identical streams everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1), 53-bit resolution
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // unbiased uniform in [0, n); Lemire-style rejection
  uint64_t next_below(uint64_t n) {
    uint64_t bound = (-n) % n;
    uint64_t x = next_u64();
    while (x < bound) x = next_u64();
    return x % n;
  }

  // inclusive bounds
  int64_t next_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool next_bool() { return next_below(2) == 1; }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace humor
