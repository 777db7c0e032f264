// Copyright 2026 The polyspec Authors
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

#include <array>
#include <cstdint>

namespace polyspec {

/// Philox4x32-10 block function (counter-based, splittable).
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

/// Stateless random stream: every variate is addressed by (seed, stream, index),
/// so ensemble members and refinement levels can share or split Brownian paths
/// deterministically regardless of thread scheduling.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

  /// Uniform double in (0, 1), 53-bit resolution.
  double uniform(uint64_t index) const;

  /// Standard normal variate (Box-Muller over the Philox stream).
  double normal(uint64_t index) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  std::array<uint32_t, 4> raw(uint64_t block) const;
  uint64_t seed_;
  uint64_t stream_;
};

}  // namespace polyspec
