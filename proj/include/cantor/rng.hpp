#pragma once

// Deterministic, platform-independent random streams.  Every consumer keys
// its own stream by (seed, level, purpose), so the sequence a given check
// draws never depends on what other checks ran before it — a resumed run and
// a fresh run therefore draw identical samples.

#include <cstdint>
#include <string_view>

#include "cantor/scaled.hpp"

namespace cantor {

inline uint64_t splitmix64_next(uint64_t& s) {
  uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

class Rng {
 public:
  Rng(uint64_t seed, int level, std::string_view purpose) {
    state_ = seed;
    state_ ^= splitmix64_next(state_) + static_cast<uint64_t>(level) * 0x9e3779b97f4a7c15ull;
    state_ ^= fnv1a(purpose);
    // burn a few outputs so nearby keys decorrelate
    for (int i = 0; i < 4; ++i) splitmix64_next(state_);
  }

  uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform point of the unit disc (rejection-free via sqrt law).
  cplx unit_disc() {
    double r = std::sqrt(uniform());
    double t = 2.0 * 3.14159265358979323846 * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  // Uniform point of the unit circle.
  cplx unit_circle() {
    double t = 2.0 * 3.14159265358979323846 * uniform();
    return {std::cos(t), std::sin(t)};
  }

 private:
  uint64_t state_;
};

}  // namespace cantor
