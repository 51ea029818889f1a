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
#include <span>
#include <string>
#include <vector>

namespace vrise {

// Dense H x W x C float image, row-major, channel-last. Masks and saliency
// maps are single-channel images.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels = 1, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * width_;
  }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& at(int y, int x, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int y, int x, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::vector<float>& storage() { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  std::string shape_string() const;

  double mean() const;
  float min_value() const;
  float max_value() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Pointwise product of an image with a single-channel mask of equal H x W.
Image apply_mask(const Image& image, const Image& mask);

// Rescales values to [0, 1]; a constant image maps to all zeros.
Image normalize_min_max(const Image& image);

// Binary netpbm (P5 grayscale / P6 RGB, maxval 255) reader and writer.
Image read_netpbm(const std::string& path);
void write_netpbm(const std::string& path, const Image& image);

}  // namespace vrise
