#pragma once
// Deterministic random number generator (splitmix64) with hand-rolled draws,
// so sampled values do not depend on the standard library implementation.
#include <cmath>
#include <cstdint>

#include "stparse/types.hpp"

namespace stparse {

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  Scalar uniform() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }

  Scalar uniform(Scalar a, Scalar b) { return a + (b - a) * uniform(); }

  // Uniform integer in [0, n), n > 0.
  int uniform_int(int n) {
    return static_cast<int>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  Scalar normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Scalar u1 = 0;
    do {
      u1 = uniform();
    } while (u1 <= 0);
    Scalar u2 = uniform();
    Scalar r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  // Independent child stream; advances this stream by one draw.
  Rng fork() { return Rng(next_u64()); }

 private:
  std::uint64_t state_ = 0;
  bool have_spare_ = false;
  Scalar spare_ = 0;
};

}  // namespace stparse
