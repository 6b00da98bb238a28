// Copyright 2026 The noisegrad Authors
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

#include <cstdint>
#include <limits>
#include <random>

namespace noisegrad {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Keyed random stream tree. A stream is identified by the master seed and a
/// path of integer indices; the key of child i of a stream with key k is
/// mix64(k ^ mix64(i)). Streams with different paths are statistically
/// independent and can be consumed in any order.
///
/// Harness paths: (set) -> parameters | noise | (experiment) -> (point).
class Substream {
 public:
  explicit constexpr Substream(std::uint64_t master_seed) : key_(mix64(master_seed)) {}

  constexpr Substream child(std::uint64_t index) const {
    Substream s(0);
    s.key_ = mix64(key_ ^ mix64(index));
    return s;
  }

  constexpr std::uint64_t key() const { return key_; }

  std::mt19937_64 engine() const { return std::mt19937_64(key_); }

 private:
  std::uint64_t key_;
};

}  // namespace noisegrad
