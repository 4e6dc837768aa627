#pragma once

#include <cstdint>

namespace mdpb {

// =====================================================================
// Counter-based splittable random streams
// =====================================================================
//
// A stream is addressed by (seed, k1, k2, k3).  Draws within a stream are
// sequential; streams with distinct keys are statistically independent.
// Monte Carlo loops derive one stream per (path, stage) or per sample
// index, so results depend only on the seed and the addressing scheme,
// never on thread count or iteration order.

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  static Rng stream(std::uint64_t seed, std::uint64_t k1 = 0,
                    std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
    std::uint64_t s = seed ^ 0x9E3779B97F4A7C15ull;
    s = mix64(s + 0x9E3779B97F4A7C15ull * (k1 + 1));
    s = mix64(s + 0x9E3779B97F4A7C15ull * (k2 + 1));
    s = mix64(s + 0x9E3779B97F4A7C15ull * (k3 + 1));
    return Rng(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // uniform on [0,1), 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on the open interval (0,1); safe as a quantile-function input
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian();

  // uniform on [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

// Quantile function of N(0,1).  Acklam's rational approximation refined by
// one Halley step through erfc; absolute error below 1e-14 on (0,1).
double inverse_normal_cdf(double u);

inline double Rng::gaussian() { return inverse_normal_cdf(uniform01_open()); }

}  // namespace mdpb
