#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fracmle {

// Counter-based generator. Draw k is a fixed 64-bit mix of (key, k), so
// streams with distinct keys are independent and draws can be taken in any
// order; parallel reps stay reproducible regardless of scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed ^ 0x8f462907355c1c63ull) + stream)) {}

  // strictly inside (0,1)
  double uniform(std::uint64_t ctr) const {
    std::uint64_t z = mix(key_ ^ mix(ctr + 0x2545f4914f6cdd1dull));
    return (static_cast<double>(z >> 11) + 0.5) * 0x1p-53;
  }

  // box-muller pair at counters (2k, 2k+1)
  void gauss_pair(std::uint64_t k, double& g0, double& g1) const {
    double u1 = uniform(2 * k);
    double u2 = uniform(2 * k + 1);
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    g0 = r * std::cos(a);
    g1 = r * std::sin(a);
  }

  double gauss(std::uint64_t k) const {
    double g0, g1;
    gauss_pair(k, g0, g1);
    return g0;
  }

  std::vector<double> gauss_vector(std::size_t count, std::uint64_t base = 0) const {
    std::vector<double> out(count);
    std::size_t i = 0;
    std::uint64_t k = base;
    while (i < count) {
      double g0, g1;
      gauss_pair(k++, g0, g1);
      out[i++] = g0;
      if (i < count) out[i++] = g1;
    }
    return out;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace fracmle
