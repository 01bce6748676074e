// Copyright 2026 The wsee-opt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wsee {

// Reproducibility contract: everything here is defined in terms of the raw
// 64-bit output stream of std::mt19937_64 (fully specified by the standard)
// plus explicit arithmetic. No std::*_distribution is used anywhere, so a
// given seed yields the same draws on every standard library.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for an independent substream, mixed from a master seed and a stream
/// index. Distinct indices give decorrelated streams, so work fanned out by
/// index is reproducible independent of scheduling.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  (void)splitmix64(s);
  s ^= 0x5851f42d4c957f2dULL * (index + 1);
  std::uint64_t mixed = splitmix64(s);
  return mixed ? mixed : 0x9e3779b97f4a7c15ULL;
}

/// Uniform draw in the open interval (0, 1), 53-bit resolution.
inline double uniform_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

struct GaussianPair {
  double z0;
  double z1;
};

/// Two independent standard normal draws via the Box-Muller transform.
/// Consumes exactly two generator outputs.
inline GaussianPair gaussian_pair(std::mt19937_64& rng) {
  const double u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * 3.141592653589793238462643383279502884 * u2;
  return {mag * std::cos(ang), mag * std::sin(ang)};
}

}  // namespace wsee
