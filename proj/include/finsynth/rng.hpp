// Copyright 2026 The finsynth Authors.
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

// Seeded randomness with draws defined here rather than by <random>
// distributions, whose output is implementation-specific. Generated datasets
// therefore stay byte-identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace finsynth {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a(std::string_view data, std::uint64_t h = kFnvOffset) {
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

/// Stable per-item seed: depends only on the inputs, never on call order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = fnv1a_u64(base);
  h = fnv1a(tag, h);
  h ^= 0x1fu;  // separator so ("ab", 1) and ("a", ...) cannot alias
  h *= kFnvPrime;
  return fnv1a_u64(index, h);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi], by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double log_uniform(double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform01());
  }

  template <typename Container>
  const auto& pick(const Container& c) {
    if (c.empty()) throw std::invalid_argument("pick: empty container");
    auto it = c.begin();
    std::advance(it, uniform_int(0, static_cast<std::int64_t>(c.size()) - 1));
    return *it;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace finsynth
