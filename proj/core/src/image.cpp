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

#include "vrise/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace vrise {

Image::Image(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw std::invalid_argument("Image: dimensions must be positive, got " +
                                std::to_string(height) + "x" +
                                std::to_string(width) + "x" +
                                std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

std::string Image::shape_string() const {
  return std::to_string(height_) + "x" + std::to_string(width_) + "x" +
         std::to_string(channels_);
}

double Image::mean() const {
  if (data_.empty()) return 0.0;
  double sum = 0.0;
  for (float v : data_) sum += v;
  return sum / static_cast<double>(data_.size());
}

float Image::min_value() const {
  return data_.empty() ? 0.0f : *std::min_element(data_.begin(), data_.end());
}

float Image::max_value() const {
  return data_.empty() ? 0.0f : *std::max_element(data_.begin(), data_.end());
}

Image apply_mask(const Image& image, const Image& mask) {
  if (mask.channels() != 1 || mask.height() != image.height() ||
      mask.width() != image.width()) {
    throw std::invalid_argument("apply_mask: mask " + mask.shape_string() +
                                " does not match image " +
                                image.shape_string());
  }
  Image out = image;
  auto dst = out.data();
  auto m = mask.data();
  const int c = image.channels();
  for (std::size_t p = 0; p < m.size(); ++p) {
    for (int k = 0; k < c; ++k) dst[p * c + k] *= m[p];
  }
  return out;
}

Image normalize_min_max(const Image& image) {
  Image out = image;
  const float lo = image.min_value();
  const float hi = image.max_value();
  const float range = hi - lo;
  for (float& v : out.data()) v = range > 0.0f ? (v - lo) / range : 0.0f;
  return out;
}

namespace {

void skip_netpbm_space(std::istream& in) {
  while (true) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_netpbm_int(std::istream& in) {
  skip_netpbm_space(in);
  int value = -1;
  if (!(in >> value)) throw std::runtime_error("netpbm: malformed header");
  return value;
}

}  // namespace

Image read_netpbm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("netpbm: cannot open " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw std::runtime_error("netpbm: unsupported magic in " + path);
  }
  const int width = read_netpbm_int(in);
  const int height = read_netpbm_int(in);
  const int maxval = read_netpbm_int(in);
  if (maxval != 255) throw std::runtime_error("netpbm: only maxval 255");
  in.get();
  Image out(height, width, channels);
  std::vector<unsigned char> raw(out.size());
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error("netpbm: truncated payload in " + path);
  }
  auto dst = out.data();
  for (std::size_t i = 0; i < raw.size(); ++i) dst[i] = raw[i] / 255.0f;
  return out;
}

void write_netpbm(const std::string& path, const Image& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw std::invalid_argument("netpbm: need 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("netpbm: cannot write " + path);
  out << (image.channels() == 1 ? "P5" : "P6") << "\n"
      << image.width() << " " << image.height() << "\n255\n";
  std::vector<unsigned char> raw(image.size());
  auto src = image.data();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<unsigned char>(
        std::lround(std::clamp(src[i], 0.0f, 1.0f) * 255.0f));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
}

}  // namespace vrise
