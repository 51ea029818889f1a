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
#include <vector>

#include "vrise/gridgen.hpp"
#include "vrise/rng.hpp"

namespace vrise::gridgen {
namespace {

TEST(CountTest, VisibleTargetMatchesIntegerCeiling) {
  for (std::size_t n = 1; n <= 100; ++n) {
    for (std::size_t k = 1; k < 20; ++k) {
      const std::size_t expected = (n * k + 19) / 20;
      EXPECT_EQ(visible_target(n, static_cast<double>(k) / 20.0), expected) << n << " " << k;
      EXPECT_EQ(visible_target(n, 0.05 * static_cast<double>(k)), expected) << n << " " << k;
    }
  }
  EXPECT_EQ(visible_target(10, 0.0), 0u);
  EXPECT_EQ(visible_target(10, 1.0), 10u);
}

TEST(CountTest, OccludedTargetMatchesIntegerFloor) {
  for (std::size_t n = 1; n <= 100; ++n) {
    for (std::size_t k = 1; k < 20; ++k) {
      EXPECT_EQ(occluded_target(n, static_cast<double>(k) / 20.0), n * (20 - k) / 20);
    }
  }
}

TEST(UninformativeProbabilityTest, ClosedForm) {
  EXPECT_NEAR(uninformative_probability(9, 0.1), 0.387420489 + 1e-9, 1e-15);
  EXPECT_NEAR(uninformative_probability(16, 0.125), std::pow(0.875, 16) + std::pow(0.125, 16),
              1e-15);
  EXPECT_DOUBLE_EQ(uninformative_probability(4, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(uninformative_probability(1, 0.3), 1.0);
}

TEST(ThresholdTest, MeanFillRate) {
  RandomStream rng(5, StreamDomain::kSelector);
  std::size_t ones = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) ones += threshold_grid(25, 0.3, rng).fill_count();
  const double rate = static_cast<double>(ones) / (draws * 25.0);
  EXPECT_NEAR(rate, 0.3, 5.0 * std::sqrt(0.3 * 0.7 / (draws * 25.0)));
}

TEST(CoordinateTest, NeverUninformative) {
  RandomStream rng(6, StreamDomain::kSelector);
  for (std::size_t n : {2u, 3u, 9u, 16u, 49u}) {
    for (double p1 : {0.01, 0.1, 0.5, 0.51, 0.9, 0.99}) {
      for (int i = 0; i < 500; ++i) {
        const auto s = coordinate_grid(n, p1, rng);
        ASSERT_FALSE(s.is_uninformative()) << n << " " << p1;
        if (p1 <= 0.5) {
          ASSERT_LE(s.fill_count(), visible_target(n, p1));
        } else {
          ASSERT_GE(s.fill_count(), n - std::max<std::size_t>(1, occluded_target(n, p1)));
        }
      }
    }
  }
}

TEST(PermutationTest, ExactCountAndUniformPlacement) {
  RandomStream rng(7, StreamDomain::kSelector);
  std::vector<int> hits(10, 0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const auto s = permutation_grid(10, 0.3, rng);
    ASSERT_EQ(s.fill_count(), 3u);
    for (std::size_t c = 0; c < 10; ++c) hits[c] += s.bits[c];
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(draws), 0.3, 0.02);
}

TEST(ConstantTest, ExplicitExtremes) {
  RandomStream rng(8, StreamDomain::kSelector);
  for (auto* gen : {&coordinate_grid, &permutation_grid}) {
    const auto zeros = gen(9, 0.0, rng);
    EXPECT_EQ(zeros.fill_count(), 0u);
    EXPECT_TRUE(zeros.explicitly_uninformative);
    const auto ones = gen(9, 1.0, rng);
    EXPECT_EQ(ones.fill_count(), 9u);
    EXPECT_TRUE(ones.explicitly_uninformative);
  }
  EXPECT_THROW(threshold_grid(9, 1.5, rng), std::invalid_argument);
  EXPECT_THROW(threshold_grid(0, 0.5, rng), std::invalid_argument);
}

TEST(GeneratorKindTest, ParseRoundTrip) {
  for (const std::string text : {"threshold", "coordinate", "permutation",
                                 "hybrid:threshold+coordinate@0",
                                 "hybrid:threshold+permutation@0.25"}) {
    EXPECT_EQ(GeneratorKind::parse(text).to_string(), text);
  }
  const auto h = GeneratorKind::parse("hybrid:threshold+permutation@0.25");
  EXPECT_EQ(h.kind, Generator::kHybrid);
  EXPECT_EQ(h.fixer, Generator::kPermutation);
  EXPECT_DOUBLE_EQ(h.p_u_threshold, 0.25);
  EXPECT_THROW(GeneratorKind::parse("voronoi"), std::invalid_argument);
  EXPECT_THROW(GeneratorKind::parse("hybrid:threshold@0"), std::invalid_argument);
  EXPECT_THROW(GeneratorKind::parse("hybrid:threshold+coordinate@2"), std::invalid_argument);
}

TEST(HybridTest, FixingGate) {
  EXPECT_TRUE(hybrid_fixing_enabled(0.0, 9, 0.1));
  EXPECT_FALSE(hybrid_fixing_enabled(0.5, 9, 0.1));   // P_U 0.387
  EXPECT_TRUE(hybrid_fixing_enabled(0.3, 9, 0.1));
  EXPECT_FALSE(hybrid_fixing_enabled(0.5, 49, 0.5));
  EXPECT_EQ(hybrid_round_cap(9, 0.1),
            10u * static_cast<std::size_t>(std::ceil(1.0 / (1.0 - uninformative_probability(9, 0.1)))));
}

TEST(HybridTest, DisabledFixingIsBitIdenticalToBase) {
  const auto hybrid = GeneratorKind::hybrid(Generator::kThreshold, Generator::kCoordinate, 0.5);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    EXPECT_EQ(make_selector(hybrid, 49, 0.5, 3, i).bits,
              make_selector(GeneratorKind::threshold(), 49, 0.5, 3, i).bits);
  }
}

TEST(HybridTest, FixesOnlyUninformativeSelectors) {
  const auto hybrid = GeneratorKind::hybrid(Generator::kThreshold, Generator::kCoordinate, 0.0);
  std::size_t replaced = 0;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const auto base = make_selector(GeneratorKind::threshold(), 9, 0.1, 4, i);
    const auto fixed = make_selector(hybrid, 9, 0.1, 4, i);
    ASSERT_FALSE(fixed.is_uninformative());
    if (base.is_uninformative()) {
      ++replaced;
    } else {
      ASSERT_EQ(base.bits, fixed.bits);
    }
  }
  EXPECT_GT(replaced, 0u);
}

TEST(HybridTest, ExtremesAndImpossibleFixers) {
  const auto hybrid = GeneratorKind::hybrid(Generator::kThreshold, Generator::kCoordinate, 0.0);
  const auto zeros = make_selector(hybrid, 9, 0.0, 1, 0);
  EXPECT_EQ(zeros.fill_count(), 0u);
  EXPECT_TRUE(zeros.explicitly_uninformative);
  EXPECT_THROW(make_selector(hybrid, 1, 0.5, 1, 0), std::invalid_argument);
  const auto perm = GeneratorKind::hybrid(Generator::kThreshold, Generator::kPermutation, 0.0);
  EXPECT_THROW(make_selector(perm, 4, 0.9, 1, 0), std::invalid_argument);
}

TEST(BatchTest, MatchesIndividualSelectors) {
  const auto kind = GeneratorKind::permutation();
  const auto batch = generate_batch(kind, 16, 0.25, 9, 50);
  ASSERT_EQ(batch.size(), 50u);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(batch[i].bits, make_selector(kind, 16, 0.25, 9, i).bits);
  }
  EXPECT_THROW(hybrid_grid(Generator::kThreshold, Generator::kCoordinate, 0.0, 9, 0.1, 1, 0),
               std::invalid_argument);
}

}  // namespace
}  // namespace vrise::gridgen
