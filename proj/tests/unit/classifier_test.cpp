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

#include <vector>

#include "vrise/classifier.hpp"
#include "vrise/half.hpp"

namespace vrise {
namespace {

TEST(PrecisionTest, ParseAndPrint) {
  EXPECT_EQ(parse_precision("fp16"), Precision::kFp16);
  EXPECT_EQ(parse_precision("fp32"), Precision::kFp32);
  EXPECT_EQ(to_string(Precision::kFp16), "fp16");
  EXPECT_THROW(parse_precision("bf16"), std::invalid_argument);
}

TEST(ValidateBatchTest, RejectsEmptyAndMixedShapes) {
  std::vector<Image> empty;
  EXPECT_THROW(validate_batch(empty), std::invalid_argument);
  std::vector<Image> mixed{Image(4, 4, 3), Image(4, 5, 3)};
  EXPECT_THROW(validate_batch(mixed), std::invalid_argument);
  std::vector<Image> ok{Image(4, 4, 3), Image(4, 4, 3)};
  EXPECT_NO_THROW(validate_batch(ok));
}

TEST(RegionOracleTest, MeanBrightnessOverUnion) {
  RegionOracleSpec spec;
  spec.targets = {{0, 0, 2, 2}, {1, 1, 3, 3}};  // union covers 7 pixels
  spec.num_classes = 3;
  RegionOracle oracle(spec, 4, 4);
  EXPECT_EQ(oracle.region_pixels().size(), 7u);

  Image img(4, 4, 2);
  img.at(0, 0, 0) = 1.0f;  // inside
  img.at(1, 1, 1) = 0.5f;  // inside, shared by both rectangles
  img.at(3, 3, 0) = 1.0f;  // outside
  const auto s = oracle.score(img, Precision::kFp32);
  ASSERT_EQ(s.size(), 3u);
  const double expected = (1.0 + 0.5) / (7.0 * 2.0);
  EXPECT_NEAR(s[0], expected, 1e-7);
  EXPECT_NEAR(s[1], (1.0 - expected) / 2.0, 1e-7);
  EXPECT_NEAR(s[2], (1.0 - expected) / 2.0, 1e-7);
}

TEST(RegionOracleTest, SlopeClampsAndHalfRounds) {
  RegionOracleSpec spec;
  spec.targets = {{0, 0, 2, 2}};
  spec.slope = 3.0;
  RegionOracle oracle(spec, 2, 2);
  EXPECT_FLOAT_EQ(oracle.score(Image(2, 2, 1, 0.5f), Precision::kFp32)[0], 1.0f);
  EXPECT_FLOAT_EQ(oracle.score(Image(2, 2, 1, 0.0f), Precision::kFp32)[0], 0.0f);
  const Image third(2, 2, 1, 1.0f / 9.0f);
  const float full = oracle.score(third, Precision::kFp32)[0];
  EXPECT_EQ(oracle.score(third, Precision::kFp16)[0], round_to_half(full));
}

TEST(RegionOracleTest, BatchPreservesOrder) {
  RegionOracleSpec spec;
  spec.targets = {{0, 0, 3, 3}};
  RegionOracle oracle(spec, 3, 3);
  std::vector<Image> batch;
  for (int i = 0; i < 10; ++i) batch.emplace_back(3, 3, 1, static_cast<float>(i) / 10.0f);
  const auto scores = oracle.score_batch(batch);
  ASSERT_EQ(scores.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(scores[i][0], i / 10.0, 1e-6);
  EXPECT_EQ(region_oracle_score(batch[4], spec), scores[4]);
}

TEST(RegionOracleTest, RejectsBadSpecs) {
  RegionOracleSpec spec;
  EXPECT_THROW(RegionOracle(spec, 4, 4), std::invalid_argument);
  spec.targets = {{0, 0, 5, 1}};
  EXPECT_THROW(RegionOracle(spec, 4, 4), std::invalid_argument);
  spec.targets = {{0, 0, 1, 1}};
  spec.num_classes = 1;
  EXPECT_THROW(RegionOracle(spec, 4, 4), std::invalid_argument);
  spec.num_classes = 2;
  RegionOracle oracle(spec, 4, 4);
  std::vector<Image> wrong{Image(3, 4, 1)};
  EXPECT_THROW(oracle.score_batch(wrong), std::invalid_argument);
}

}  // namespace
}  // namespace vrise
