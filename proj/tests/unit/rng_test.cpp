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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "vrise/parallel.hpp"
#include "vrise/rng.hpp"

namespace vrise {
namespace {

TEST(PhiloxTest, KnownAnswerZero) {
  const PhiloxCounter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(PhiloxTest, KnownAnswerOnes) {
  const PhiloxCounter out = philox4x32_10(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(PhiloxTest, KnownAnswerPi) {
  const PhiloxCounter out = philox4x32_10(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStreamTest, FirstWordsAreTheBlockOfCounterZero) {
  const std::uint64_t seed = 0x1234567890abcdefull;
  RandomStream rng(seed, StreamDomain::kSelector, 7, 3);
  const PhiloxCounter expected = philox4x32_10(
      {0u, (2u << 24) | 3u, 7u, 0u},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  for (std::uint32_t word : expected) EXPECT_EQ(rng(), word);
}

TEST(RandomStreamTest, Reproducible) {
  RandomStream a(42, StreamDomain::kMeshSeeds, 5);
  RandomStream b(42, StreamDomain::kMeshSeeds, 5);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RandomStreamTest, AddressesAreDistinct) {
  std::set<std::uint64_t> firsts;
  for (auto domain : {StreamDomain::kMeshSeeds, StreamDomain::kSelector,
                      StreamDomain::kShift, StreamDomain::kFixer}) {
    for (std::uint64_t index = 0; index < 4; ++index) {
      for (std::uint32_t sub = 0; sub < 4; ++sub) {
        RandomStream rng(1, domain, index, sub);
        firsts.insert(rng.next_u64());
      }
    }
  }
  EXPECT_EQ(firsts.size(), 64u);
}

TEST(RandomStreamTest, UniformInUnitInterval) {
  RandomStream rng(3, StreamDomain::kExperiment);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // 5 standard errors of the mean of U(0, 1).
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RandomStreamTest, BelowIsUnbiased) {
  RandomStream rng(9, StreamDomain::kExperiment);
  const int n = 60000;
  std::vector<int> counts(6, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = rng.below(6);
    ASSERT_LT(v, 6u);
    ++counts[v];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
  // chi-square, 5 degrees of freedom, p = 0.001.
  EXPECT_LT(chi2, 20.52);
  EXPECT_EQ(rng.below(1), 0u);
  EXPECT_THROW(rng.below(0), std::invalid_argument);
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(ParallelForTest, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
}  // namespace vrise
