#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace sfcdd {

// All randomness in the library flows through this wrapper. Distribution
// objects from <random> are avoided in seeded result paths because their
// output is not pinned down by the standard; the samplers below are, so runs
// are bitwise reproducible across standard libraries.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Stable seed derivation for (base, point, run) tuples; sweeps stay
// order-independent because each run's stream depends only on its key.
inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
  uint64_t s = base;
  uint64_t x = splitmix64(s);
  s = x ^ (0x9E3779B97F4A7C15ull * (a + 1));
  x = splitmix64(s);
  s = x ^ (0xC2B2AE3D27D4EB4Full * (b + 1));
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // 53-bit uniform in [0, 1)
  double canonical() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform_pm1() { return 2.0 * canonical() - 1.0; }

  bool bernoulli(double p) { return canonical() < p; }

  // unbiased uniform integer in [0, n), bitmask rejection
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t mask = ~uint64_t{0} >> __builtin_clzll(n - 1 | 1);
    for (;;) {
      uint64_t v = gen_() & mask;
      if (v < n) return v;
    }
  }

  // uniform k-subset of {0,...,n-1}, returned ascending
  std::vector<int> subset(int n, int k) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(below(static_cast<uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sfcdd
