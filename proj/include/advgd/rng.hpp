#pragma once

#include <cmath>
#include <cstdint>

// Counter-style deterministic random streams. Every draw is a pure function
// of the stream keys, so replaying a run or querying draws out of order
// yields identical values on any platform.

namespace advgd::rng {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Collapses two seeds into one; asymmetric in its arguments.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64_next(s);
  s = h ^ (b * 0xff51afd7ed558ccdull + 0x2545f4914f6cdd1dull);
  return splitmix64_next(s);
}

/// Small deterministic generator keyed by up to three 64-bit values.
class Stream {
 public:
  explicit Stream(std::uint64_t k0, std::uint64_t k1 = 0, std::uint64_t k2 = 0)
      : state_(0x853c49e6748fea9bull) {
    absorb(k0);
    absorb(k1);
    absorb(k2);
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe to pass to log().
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform in [low, high).
  double next_uniform(double low, double high) {
    double v = low + (high - low) * next_unit();
    if (v >= high) v = std::nextafter(high, low);  // guard the half-open contract
    return v;
  }

  /// Standard normal via Box-Muller.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  void absorb(std::uint64_t k) {
    state_ = splitmix64_next(state_) ^ (k * 0xff51afd7ed558ccdull + 0x2545f4914f6cdd1dull);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace advgd::rng
