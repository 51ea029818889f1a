/*
 * Copyright 2026 The vrise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace vrise {

// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// Independent sub-streams of one master seed. The domain separates the
// different consumers of randomness so that, e.g., mesh seeds and selector
// bits never share a stream.
enum class StreamDomain : std::uint8_t {
  kMeshSeeds = 1,
  kSelector = 2,
  kShift = 3,
  kFixer = 4,
  kCorpus = 5,
  kExperiment = 6,
};

// Counter-based random stream addressed by (master_seed, domain, index, sub).
// Two streams with different addresses are statistically independent, and a
// stream's output never depends on how many other streams were consumed, so
// parallel consumers produce identical results regardless of scheduling.
//
// Satisfies UniformRandomBitGenerator, but uniform() / below() should be
// preferred: std distributions are implementation-defined.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t master_seed, StreamDomain domain,
               std::uint64_t index = 0, std::uint32_t sub = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();
  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  // Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  PhiloxKey key_;
  PhiloxCounter counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int position_ = 4;
};

}  // namespace vrise
