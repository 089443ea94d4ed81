// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tsica authors

#pragma once

#include <array>
#include <cstdint>

namespace tsica {

/// xoshiro256** seeded through splitmix64. The algorithm is fixed by its
/// published constants, so a seed yields the same stream on every platform
/// (unlike the std:: distributions, whose algorithms are unspecified).
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

private:
  std::array<std::uint64_t, 4> state_{};
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace tsica
