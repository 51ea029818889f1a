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

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrise/image.hpp"

namespace vrise {

enum class Precision { kFp32, kFp16 };

std::string to_string(Precision p);
Precision parse_precision(const std::string& text);

using ConfidenceVector = std::vector<float>;

// Base of every scorer failure, so callers can distinguish model trouble
// from their own invalid arguments.
class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Black-box batch classifier. Implementations must be safe to call from
// several threads and must return one vector per image, in order, each of
// num_classes() entries.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual int num_classes() const = 0;
  virtual std::vector<ConfidenceVector> score_batch(
      std::span<const Image> images, Precision precision) = 0;

  std::vector<ConfidenceVector> score_batch(std::span<const Image> images) {
    return score_batch(images, Precision::kFp32);
  }
};

// Throws std::invalid_argument for an empty batch or mixed shapes.
void validate_batch(std::span<const Image> images);

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;  // exclusive
  int y1 = 0;  // exclusive

  int area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct RegionOracleSpec {
  std::vector<Rect> targets;
  int num_classes = 2;
  double slope = 1.0;
};

// Synthetic classifier with known saliency: the class-0 score is the mean
// brightness (over channels) of the pixels covered by the target
// rectangles, times `slope`, clamped to [0, 1]. The other classes share the
// remainder equally. fp16 requests round the scores to half precision.
class RegionOracle final : public Scorer {
 public:
  RegionOracle(RegionOracleSpec spec, int height, int width);

  int num_classes() const override { return spec_.num_classes; }
  std::vector<ConfidenceVector> score_batch(std::span<const Image> images,
                                            Precision precision) override;
  using Scorer::score_batch;

  ConfidenceVector score(const Image& image, Precision precision) const;
  const RegionOracleSpec& spec() const { return spec_; }
  // Pixels inside the union of the targets, row-major.
  const std::vector<std::size_t>& region_pixels() const { return region_; }

 private:
  RegionOracleSpec spec_;
  int height_;
  int width_;
  std::vector<std::size_t> region_;
};

ConfidenceVector region_oracle_score(const Image& image,
                                     const RegionOracleSpec& spec);

}  // namespace vrise
