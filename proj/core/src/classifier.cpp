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

#include "vrise/classifier.hpp"

#include <algorithm>

#include "vrise/half.hpp"

namespace vrise {

std::string to_string(Precision p) {
  return p == Precision::kFp16 ? "fp16" : "fp32";
}

Precision parse_precision(const std::string& text) {
  if (text == "fp32" || text == "f32") return Precision::kFp32;
  if (text == "fp16" || text == "f16") return Precision::kFp16;
  throw std::invalid_argument("unknown precision '" + text + "'");
}

void validate_batch(std::span<const Image> images) {
  if (images.empty()) throw std::invalid_argument("score_batch: empty batch");
  for (const Image& im : images) {
    if (im.empty()) throw std::invalid_argument("score_batch: empty image");
    if (!im.same_shape(images.front())) {
      throw std::invalid_argument("score_batch: mixed image shapes " +
                                  images.front().shape_string() + " and " +
                                  im.shape_string());
    }
  }
}

RegionOracle::RegionOracle(RegionOracleSpec spec, int height, int width)
    : spec_(std::move(spec)), height_(height), width_(width) {
  if (spec_.num_classes < 2) {
    throw std::invalid_argument("RegionOracle: need at least 2 classes");
  }
  if (spec_.targets.empty()) {
    throw std::invalid_argument("RegionOracle: need at least one target");
  }
  for (const Rect& r : spec_.targets) {
    if (r.x0 < 0 || r.y0 < 0 || r.x1 > width || r.y1 > height ||
        r.x0 >= r.x1 || r.y0 >= r.y1) {
      throw std::invalid_argument("RegionOracle: target rectangle out of bounds");
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const bool inside =
          std::any_of(spec_.targets.begin(), spec_.targets.end(),
                      [&](const Rect& r) { return r.contains(x, y); });
      if (inside) region_.push_back(static_cast<std::size_t>(y) * width + x);
    }
  }
}

ConfidenceVector RegionOracle::score(const Image& image,
                                     Precision precision) const {
  if (image.height() != height_ || image.width() != width_) {
    throw std::invalid_argument("RegionOracle: image " + image.shape_string() +
                                " does not match oracle area");
  }
  const int c = image.channels();
  auto px = image.data();
  double sum = 0.0;
  for (std::size_t p : region_) {
    for (int k = 0; k < c; ++k) sum += px[p * c + k];
  }
  const double brightness = sum / (static_cast<double>(region_.size()) * c);
  const double s0 = std::clamp(spec_.slope * brightness, 0.0, 1.0);
  ConfidenceVector out(spec_.num_classes,
                       static_cast<float>((1.0 - s0) / (spec_.num_classes - 1)));
  out[0] = static_cast<float>(s0);
  if (precision == Precision::kFp16) round_to_half(out);
  return out;
}

std::vector<ConfidenceVector> RegionOracle::score_batch(
    std::span<const Image> images, Precision precision) {
  validate_batch(images);
  std::vector<ConfidenceVector> out;
  out.reserve(images.size());
  for (const Image& im : images) out.push_back(score(im, precision));
  return out;
}

ConfidenceVector region_oracle_score(const Image& image,
                                     const RegionOracleSpec& spec) {
  return RegionOracle(spec, image.height(), image.width())
      .score(image, Precision::kFp32);
}

}  // namespace vrise
