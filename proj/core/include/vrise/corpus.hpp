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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vrise/classifier.hpp"
#include "vrise/image.hpp"
#include "vrise/metrics.hpp"

namespace vrise::experiments {

// One evaluation image with its annotation and region-oracle spec.
struct CorpusItem {
  std::string id;
  Image image;
  std::vector<metrics::BoundingBox> boxes;
  RegionOracleSpec oracle;
};

struct CorpusOptions {
  int height = 64;
  int width = 64;
  int channels = 3;
  std::size_t min_instances = 1;
  std::size_t max_instances = 1;
  // Rectangle sides are drawn from [min_side, max_side] of the image side.
  double min_side = 0.125;
  double max_side = 0.375;
  // Pixel brightness is drawn from [min_level, 1].
  double min_level = 0.25;
};

// Random rectangle fully inside an h x w image.
Rect random_rect(int height, int width, double min_side, double max_side,
                 RandomStream& rng);

// Item `index` of the synthetic corpus of `seed`: textured image, 1..k
// class-0 target rectangles and matching boxes.
CorpusItem synthetic_item(std::uint64_t seed, std::size_t index,
                          const CorpusOptions& options = {});
std::vector<CorpusItem> synthetic_corpus(std::uint64_t seed, std::size_t count,
                                         const CorpusOptions& options = {});

// Image from a binary PGM/PPM with boxes from a JSON file of the form
// {"boxes": [{"class": 0, "x0": .., "y0": .., "x1": .., "y1": ..}]}.
// Class-0 boxes become the oracle targets.
CorpusItem load_item(const std::filesystem::path& image_path,
                     const std::filesystem::path& boxes_path);

std::vector<metrics::BoundingBox> read_boxes(const std::filesystem::path& path);

// "single" (1 instance), "few" (2-4) or "many" (5+).
std::string instance_bin(std::size_t instances);

}  // namespace vrise::experiments
