// Copyright 2026 The oamqkd Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>

namespace oamqkd {

// SplitMix64 finalizer, used only to decorrelate substream seeds.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded PRNG stream. Every draw consumes exactly one 64-bit engine output,
// and the float conversion is done by hand so that sequences are identical
// across standard library implementations.
class Rng {
public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform index in {0..n-1}; n must be positive.
  std::size_t below(std::size_t n) {
    const auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(idx, n - 1);
  }

  bool bernoulli(double p) { return uniform() < p; }

  engine_type &engine() { return engine_; }

private:
  engine_type engine_;
};

// Purpose tags keep the independent per-round streams apart.
enum class StreamTag : std::uint64_t {
  Round = 1,
  Sacrifice = 2,
  Fuzz = 3,
};

// Independent stream for (seed, round_id, tag). Streams for different rounds
// never share state, which makes per-round results schedule-independent.
inline Rng substream(std::uint64_t seed, std::uint64_t round_id,
                     StreamTag tag = StreamTag::Round) {
  const std::uint64_t a = mix64(seed ^ mix64(static_cast<std::uint64_t>(tag)));
  return Rng(mix64(a ^ mix64(round_id + 0x632be59bd9b4e019ULL)));
}

} // namespace oamqkd
