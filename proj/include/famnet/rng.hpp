#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "famnet/matrix.hpp"

namespace famnet {

// SplitMix64: used both as a plain generator and to derive stream seeds.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1] (safe as a log argument).
  double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  // Standard normal via Box-Muller. Not stdlib normal_distribution, whose
  // output sequence is implementation-defined; this one is stable everywhere.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
};

// Derives an independent stream seed from a master seed and tags.
inline uint64_t derive_seed(uint64_t master, uint64_t tag_a, uint64_t tag_b = 0) {
  SplitMix64 g(master ^ (0xd6e8feb86659fd93ULL * (tag_a + 1)) ^
               (0xa5cb3d4f1fde38c1ULL * (tag_b + 1)));
  g.next();
  return g.next();
}

// Glorot normal initialization: entries ~ N(0, 2/(fan_in+fan_out)).
inline DenseMatrix glorot_init(long fan_in, long fan_out, uint64_t seed) {
  DenseMatrix w(fan_in, fan_out);
  SplitMix64 g(seed);
  const double sd = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
  for (long i = 0; i < w.size(); ++i) w.a[i] = sd * g.normal();
  return w;
}

}  // namespace famnet
