// Copyright 2026 The ZO-Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>

namespace zoforge {

// SplitMix64 (Steele/Lea/Flood). Fixed constants, 64-bit state, no platform
// dependence. The whole regenerate-instead-of-store scheme rests on this
// sequence being reproducible from its seed alone, so the generator is
// pinned here rather than delegated to <random>.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// SplitMix64 output finalizer as a standalone avalanche function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Unbiased uniform draw in [0, bound); rejection on the top partial block.
inline std::uint64_t bounded_u64(SplitMix64& gen, std::uint64_t bound) {
  // Largest x such that [0, x] has a multiple-of-bound size.
  const std::uint64_t limit =
      ~0ull - (((~0ull % bound) + 1) % bound);
  std::uint64_t x = gen.next();
  while (x > limit) x = gen.next();
  return x % bound;
}

// Re-seedable standard-normal stream: SplitMix64 uniforms fed to the basic
// Box-Muller transform. Each uniform pair yields two normals and both are
// emitted (no rejection, no discards), so the draw count alone determines
// generator state. Uniforms are mapped to (0, 1] so log() stays finite.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed)
      : gen_(seed), seed_(seed) {}

  void reset(std::uint64_t seed) {
    gen_ = SplitMix64(seed);
    seed_ = seed;
    position_ = 0;
    has_cached_ = false;
  }

  double next() {
    ++position_;
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = to_unit(gen_.next());
    const double u2 = to_unit(gen_.next());
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
  }

  std::uint64_t position() const { return position_; }
  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  // Top 53 bits, shifted into (0, 1].
  static double to_unit(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1p-53;
  }

  SplitMix64 gen_;
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// What a derived per-step seed is consumed for. Distinct purposes yield
// independent streams from one base seed.
enum class SeedPurpose : std::uint64_t {
  perturbation = 1,
  layer_select = 2,
  batch_sample = 3,
};

// Pure mixing hash over (base_seed, purpose, step); stable across runs and
// platforms. Replaces the unspecified "sample a random seed per step" with a
// replayable derivation.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed,
                                    SeedPurpose purpose, std::uint64_t step) {
  std::uint64_t h =
      mix64(base_seed + 0x9E3779B97F4A7C15ull *
                            static_cast<std::uint64_t>(purpose));
  h = mix64(h ^ (step + 0x632BE59BD9B4E019ull));
  return h;
}

struct SeedSchedule {
  std::uint64_t base_seed = 0;

  std::uint64_t derive(SeedPurpose purpose, std::uint64_t step) const {
    return derive_seed(base_seed, purpose, step);
  }
};

}  // namespace zoforge
