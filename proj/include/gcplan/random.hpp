// Copyright 2026 The gcplan Authors
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

#ifndef GCPLAN_RANDOM_HPP_
#define GCPLAN_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <string_view>

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, a, b), so results do not depend on call order, thread
// scheduling, or how many numbers other components consumed. That is what
// makes sampled traversals, latents, and generated scenarios reproducible
// byte for byte, including under parallel evaluation.

namespace gcplan::rng {

// Stream tags keep independent consumers of the same seed decorrelated.
enum Stream : std::uint64_t {
  kStreamInit = 1,       // model weight initialisation
  kStreamTraversal = 2,  // per-sample, per-step edge picks
  kStreamLatent = 3,     // per-sample latent draws
  kStreamCluster = 4,    // k-means seeding
  kStreamGenerate = 5,   // scenario generator
  kStreamEval = 6,       // per-scenario evaluation seeds
  kStreamRepeat = 7,     // per-repeat evaluation seeds
};

// splitmix64 finaliser; full-period mixing of a 64-bit counter.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(mix64(seed) ^ stream) ^ a) ^ b);
}

// Uniform in [0, 1) with 53 significant bits.
inline double uniform01(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t a, std::uint64_t b) {
  return static_cast<double>(key(seed, stream, a, b) >> 11) * 0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t a, std::uint64_t b, double lo, double hi) {
  return lo + (hi - lo) * uniform01(seed, stream, a, b);
}

// Standard normal pair via Box-Muller. The first uniform is shifted into
// (0, 1] so the log never sees zero.
inline void normal_pair(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t a, std::uint64_t b, double* n0,
                        double* n1) {
  const double u1 =
      static_cast<double>((key(seed, stream, a, b) >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform01(seed, stream, a, b + 0x9e3779b9ULL);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  *n0 = r * std::cos(phi);
  *n1 = r * std::sin(phi);
}

// Stable 64-bit string hash (FNV-1a). Used to fold scenario ids into
// evaluation seeds; std::hash is not guaranteed stable across builds.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gcplan::rng

#endif  // GCPLAN_RANDOM_HPP_
