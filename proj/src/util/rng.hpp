#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace riskdec::util {

// Small PRNG wrapper with explicit value mappings so that seeded streams are
// identical across platforms and standard-library versions (std distributions
// are implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  uint64_t next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return std::ldexp(static_cast<double>(next_u64() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  int uniform_int(int n) { return n <= 1 ? 0 : static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

  std::vector<double> simplex_point(int d) {
    // normalized exponentials give a uniform point on the simplex
    std::vector<double> v(d);
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
      v[i] = -std::log(1.0 - uniform());
      total += v[i];
    }
    for (double& x : v) x /= total;
    return v;
  }

 private:
  uint64_t state_;
};

}  // namespace riskdec::util
