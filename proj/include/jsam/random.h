// Copyright 2026 The JSAM Authors
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

#ifndef JSAM_RANDOM_H_
#define JSAM_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace jsam {

// Seed derivation. A child seed is obtained by folding each path element
// into the root with SplitMix64:
//
//   s_0 = SplitMix64(root)
//   s_i = SplitMix64(s_{i-1} ^ (path_i + 0x9e3779b97f4a7c15))
//
// Paths are built from small integer purpose tags, seed indices and
// HashTag() of mechanism names, so every consumer of randomness owns a
// stream that does not depend on evaluation order.
std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t root,
                         std::initializer_list<std::uint64_t> path);

// 64-bit FNV-1a.
std::uint64_t HashTag(std::string_view tag);

// Purpose tags for DeriveSeed paths.
enum class SeedPurpose : std::uint64_t {
  kCosts = 1,
  kTask = 2,
  kPartition = 3,
  kSchedule = 4,
  kNoise = 5,
  kPayments = 6,
  kInitialModel = 7,
  kAudit = 8,
};

inline std::uint64_t Tag(SeedPurpose purpose) {
  return static_cast<std::uint64_t>(purpose);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double Uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double Normal() { return normal_(engine_); }
  std::uint64_t NextU64() { return engine_(); }
  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace jsam

#endif  // JSAM_RANDOM_H_
