#pragma once

// Deterministic random streams for instance generation.
//
// xoshiro256++ seeded through splitmix64, with named substreams derived by
// hashing (seed, stream label, index). The point over <random> engines:  the
// exact bit stream is pinned here, so "same seed => identical instance" holds
// across compilers and can be reproduced in other languages from this file
// alone. Distribution mapping is the usual 53-bit mantissa trick, nothing
// rejection-based, so draws are one-to-one with generator outputs.

#include <array>
#include <cstdint>
#include <string_view>

#include "mmqp/core.hpp"

namespace mmqp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over the label bytes; stable across platforms.
inline std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Independent stream for (label, index) under the same root seed.
  // Used to give every generated matrix its own stream so a change in one
  // block's draw count cannot shift another block's values.
  static Rng substream(std::uint64_t seed, std::string_view label,
                       std::uint64_t index = 0) {
    std::uint64_t mix = seed;
    std::uint64_t h = splitmix64(mix);
    mix = h ^ hash_label(label);
    h = splitmix64(mix);
    mix = h ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return Rng(splitmix64(mix));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1): 53 significant bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  Vector uniform_vector(std::size_t n, double a, double b) {
    Vector v(n);
    for (auto& x : v) x = uniform(a, b);
    return v;
  }

  Matrix uniform_matrix(std::size_t rows, std::size_t cols, double a, double b) {
    Matrix M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) M(i, j) = uniform(a, b);
    return M;
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Lemire-style rejection-free would bias; plain rejection keeps exactness.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace mmqp
