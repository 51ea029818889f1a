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

#include "vrise/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "vrise/rng.hpp"

namespace vrise::experiments {

Rect random_rect(int height, int width, double min_side, double max_side,
                 RandomStream& rng) {
  if (height < 1 || width < 1 || !(min_side > 0.0) || min_side > max_side ||
      max_side > 1.0) {
    throw std::invalid_argument("random_rect: bad arguments");
  }
  auto side = [&](int extent) {
    const int lo = std::max(1, static_cast<int>(std::lround(min_side * extent)));
    const int hi = std::max(lo, static_cast<int>(std::lround(max_side * extent)));
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  };
  const int rw = std::min(side(width), width);
  const int rh = std::min(side(height), height);
  const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(width - rw + 1)));
  const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(height - rh + 1)));
  return {x0, y0, x0 + rw, y0 + rh};
}

CorpusItem synthetic_item(std::uint64_t seed, std::size_t index,
                          const CorpusOptions& options) {
  if (options.min_instances < 1 || options.min_instances > options.max_instances) {
    throw std::invalid_argument("synthetic_item: bad instance range");
  }
  RandomStream rng(seed, StreamDomain::kCorpus, index);
  CorpusItem item;
  item.id = "synthetic-" + std::to_string(seed) + "-" + std::to_string(index);
  const std::size_t span = options.max_instances - options.min_instances + 1;
  const std::size_t instances = options.min_instances + rng.below(span);
  for (std::size_t i = 0; i < instances; ++i) {
    const Rect r = random_rect(options.height, options.width, options.min_side,
                               options.max_side, rng);
    item.oracle.targets.push_back(r);
    item.boxes.push_back({0, r.x0, r.y0, r.x1, r.y1});
  }
  item.image = Image(options.height, options.width, options.channels);
  const double lo = options.min_level;
  for (float& v : item.image.data()) {
    v = static_cast<float>(lo + (1.0 - lo) * rng.uniform());
  }
  return item;
}

std::vector<CorpusItem> synthetic_corpus(std::uint64_t seed, std::size_t count,
                                         const CorpusOptions& options) {
  std::vector<CorpusItem> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(synthetic_item(seed, i, options));
  return out;
}

std::vector<metrics::BoundingBox> read_boxes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  std::vector<metrics::BoundingBox> boxes;
  for (const auto& b : j.at("boxes")) {
    metrics::BoundingBox box{b.value("class", 0), b.at("x0").get<int>(),
                             b.at("y0").get<int>(), b.at("x1").get<int>(),
                             b.at("y1").get<int>()};
    if (box.x1 <= box.x0 || box.y1 <= box.y0) {
      throw std::invalid_argument(path.string() + ": empty box");
    }
    boxes.push_back(box);
  }
  return boxes;
}

CorpusItem load_item(const std::filesystem::path& image_path,
                     const std::filesystem::path& boxes_path) {
  CorpusItem item;
  item.id = image_path.stem().string();
  item.image = read_netpbm(image_path.string());
  item.boxes = read_boxes(boxes_path);
  for (const auto& b : item.boxes) {
    if (b.x0 < 0 || b.y0 < 0 || b.x1 > item.image.width() ||
        b.y1 > item.image.height()) {
      throw std::invalid_argument(boxes_path.string() + ": box outside image");
    }
    if (b.class_id == 0) item.oracle.targets.push_back({b.x0, b.y0, b.x1, b.y1});
  }
  return item;
}

std::string instance_bin(std::size_t instances) {
  if (instances <= 1) return "single";
  if (instances <= 4) return "few";
  return "many";
}

}  // namespace vrise::experiments
