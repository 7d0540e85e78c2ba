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

#include "jsam/random.h"

namespace jsam {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t root,
                         std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = SplitMix64(root);
  for (std::uint64_t element : path) {
    state = SplitMix64(state ^ (element + 0x9e3779b97f4a7c15ULL));
  }
  return state;
}

std::uint64_t HashTag(std::string_view tag) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace jsam
