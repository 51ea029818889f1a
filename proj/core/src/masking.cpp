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

#include "vrise/masking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vrise::masking {
namespace {

int border_index(int i, int n, BorderMode mode) {
  if (i >= 0 && i < n) return i;
  switch (mode) {
    case BorderMode::kReplicate:
      return std::clamp(i, 0, n - 1);
    case BorderMode::kReflect: {
      if (n == 1) return 0;
      const int period = 2 * (n - 1);
      int k = i % period;
      if (k < 0) k += period;
      return k < n ? k : period - k;
    }
    case BorderMode::kSymmetric: {
      const int period = 2 * n;
      int k = i % period;
      if (k < 0) k += period;
      return k < n ? k : period - 1 - k;
    }
  }
  return 0;
}

int cell_count(int extent, int side) { return (extent + side - 1) / side; }

}  // namespace

int kernel_length(double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("kernel_length: sigma must be positive");
  }
  const long length = std::lround(8.0 * sigma + 1.0 - std::fmod(sigma, 2.0));
  return static_cast<int>(length % 2 == 1 ? length : length + 1);
}

std::vector<float> gaussian_kernel(double sigma) {
  const int length = kernel_length(sigma);
  const double half = (length - 1) / 2.0;
  std::vector<double> taps(length);
  double sum = 0.0;
  for (int i = 0; i < length; ++i) {
    const double x = (i - half) / sigma;
    taps[i] = std::exp(-0.5 * x * x);
    sum += taps[i];
  }
  std::vector<float> out(length);
  for (int i = 0; i < length; ++i) out[i] = static_cast<float>(taps[i] / sum);
  return out;
}

Image gaussian_blur(const Image& image, double sigma, BorderMode border) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
  }
  if (sigma == 0.0 || image.empty()) return image;

  const std::vector<float> taps = gaussian_kernel(sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int h = image.height();
  const int w = image.width();
  const int c = image.channels();

  // Horizontal pass into `tmp`, then vertical pass row by row.
  Image tmp(h, w, c);
  std::vector<int> col_map(w + 2 * radius);
  for (int i = 0; i < w + 2 * radius; ++i) {
    col_map[i] = border_index(i - radius, w, border);
  }
  std::vector<float> padded(w + 2 * radius);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int i = 0; i < w + 2 * radius; ++i) {
        padded[i] = image.at(y, col_map[i], ch);
      }
      for (int x = 0; x < w; ++x) {
        float acc = 0.0f;
        const float* src = padded.data() + x;
        for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * src[k];
        tmp.at(y, x, ch) = acc;
      }
    }
  }

  Image out(h, w, c);
  const std::size_t row = static_cast<std::size_t>(w) * c;
  auto src = tmp.data();
  auto dst = out.data();
  for (int y = 0; y < h; ++y) {
    float* out_row = dst.data() + static_cast<std::size_t>(y) * row;
    for (int k = 0; k < static_cast<int>(taps.size()); ++k) {
      const int sy = border_index(y + k - radius, h, border);
      const float* in_row = src.data() + static_cast<std::size_t>(sy) * row;
      const float weight = taps[k];
      for (std::size_t i = 0; i < row; ++i) out_row[i] += weight * in_row[i];
    }
    for (std::size_t i = 0; i < row; ++i) {
      out_row[i] = std::clamp(out_row[i], 0.0f, 1.0f);
    }
  }
  return out;
}

Mask make_mask(Image pixels, MaskProvenance provenance) {
  Mask mask;
  mask.fill_rate = pixels.mean();
  mask.pixels = std::move(pixels);
  mask.provenance = std::move(provenance);
  return mask;
}

Mask render_vrise_mask(const geometry::VoronoiMesh& mesh,
                       const gridgen::OcclusionSelector& selector,
                       const BlurSpec& blur) {
  Image raster = geometry::rasterize_cells(
      mesh, std::span<const std::uint8_t>(selector.bits));
  MaskProvenance provenance;
  provenance.source = MaskProvenance::Source::kVoronoi;
  provenance.selector = selector;
  return make_mask(gaussian_blur(raster, blur.sigma, blur.border),
                   std::move(provenance));
}

Image bilinear_upsample(const Image& grid, int out_height, int out_width) {
  if (grid.empty()) throw std::invalid_argument("bilinear_upsample: empty grid");
  Image out(out_height, out_width, grid.channels());
  const int in_h = grid.height();
  const int in_w = grid.width();
  const double scale_y = static_cast<double>(in_h) / out_height;
  const double scale_x = static_cast<double>(in_w) / out_width;

  struct Tap {
    int i0, i1;
    double t;
  };
  auto taps_for = [](int n_out, int n_in, double scale) {
    std::vector<Tap> taps(n_out);
    for (int o = 0; o < n_out; ++o) {
      const double src = std::max(0.0, (o + 0.5) * scale - 0.5);
      const int i0 = std::min(static_cast<int>(src), n_in - 1);
      const int i1 = std::min(i0 + 1, n_in - 1);
      taps[o] = {i0, i1, src - i0};
    }
    return taps;
  };
  const auto ty = taps_for(out_height, in_h, scale_y);
  const auto tx = taps_for(out_width, in_w, scale_x);

  for (int y = 0; y < out_height; ++y) {
    const Tap& a = ty[y];
    for (int x = 0; x < out_width; ++x) {
      const Tap& b = tx[x];
      for (int c = 0; c < grid.channels(); ++c) {
        const double top = (1.0 - b.t) * grid.at(a.i0, b.i0, c) +
                           b.t * grid.at(a.i0, b.i1, c);
        const double bottom = (1.0 - b.t) * grid.at(a.i1, b.i0, c) +
                              b.t * grid.at(a.i1, b.i1, c);
        out.at(y, x, c) = static_cast<float>((1.0 - a.t) * top + a.t * bottom);
      }
    }
  }
  return out;
}

Image edge_pad(const Image& grid) {
  if (grid.empty()) throw std::invalid_argument("edge_pad: empty grid");
  const int h = grid.height();
  const int w = grid.width();
  Image out(h + 1, w + 1, grid.channels());
  for (int y = 0; y <= h; ++y) {
    for (int x = 0; x <= w; ++x) {
      for (int c = 0; c < grid.channels(); ++c) {
        out.at(y, x, c) = grid.at(std::min(y, h - 1), std::min(x, w - 1), c);
      }
    }
  }
  return out;
}

Image alignment_reference(const Image& grid, int height, int width) {
  return bilinear_upsample(edge_pad(grid), height, width);
}

Image render_grid(const Image& grid, int height, int width) {
  Image out(height, width, grid.channels());
  for (int y = 0; y < height; ++y) {
    const int gy = static_cast<int>(static_cast<long>(y) * grid.height() / height);
    for (int x = 0; x < width; ++x) {
      const int gx =
          static_cast<int>(static_cast<long>(x) * grid.width() / width);
      for (int c = 0; c < grid.channels(); ++c) {
        out.at(y, x, c) = grid.at(gy, gx, c);
      }
    }
  }
  return out;
}

Image selector_grid(const gridgen::OcclusionSelector& selector, int side) {
  if (side < 1 || selector.size() != static_cast<std::size_t>(side) * side) {
    throw std::invalid_argument("selector_grid: selector of length " +
                                std::to_string(selector.size()) +
                                " is not a " + std::to_string(side) + "x" +
                                std::to_string(side) + " grid");
  }
  Image grid(side, side, 1);
  auto dst = grid.data();
  for (std::size_t i = 0; i < selector.size(); ++i) {
    dst[i] = selector.bits[i] ? 1.0f : 0.0f;
  }
  return grid;
}

GridShift draw_shift(int side, geometry::InspectedArea area,
                     RandomStream& rng) {
  const int ch = cell_count(area.height, side);
  const int cw = cell_count(area.width, side);
  GridShift shift;
  shift.y = static_cast<int>(rng.below(static_cast<std::uint64_t>(ch)));
  shift.x = static_cast<int>(rng.below(static_cast<std::uint64_t>(cw)));
  return shift;
}

Mask rise_mask(const gridgen::OcclusionSelector& selector, int side,
               geometry::InspectedArea area, GridShift shift) {
  if (side < 1 || side > area.height || side > area.width) {
    throw std::invalid_argument("rise_mask: grid side " + std::to_string(side) +
                                " does not fit the area");
  }
  const Image grid = selector_grid(selector, side);
  const int ch = cell_count(area.height, side);
  const int cw = cell_count(area.width, side);
  if (shift.y < 0 || shift.y >= ch || shift.x < 0 || shift.x >= cw) {
    throw std::invalid_argument("rise_mask: shift outside [0, C)");
  }
  const Image up = bilinear_upsample(grid, (side + 1) * ch, (side + 1) * cw);
  Image pixels(area.height, area.width, 1);
  for (int y = 0; y < area.height; ++y) {
    for (int x = 0; x < area.width; ++x) {
      pixels.at(y, x) = up.at(y + shift.y, x + shift.x);
    }
  }
  MaskProvenance provenance;
  provenance.source = MaskProvenance::Source::kGrid;
  provenance.shift_y = shift.y;
  provenance.shift_x = shift.x;
  provenance.selector = selector;
  return make_mask(std::move(pixels), std::move(provenance));
}

Mask rise_mask(const gridgen::OcclusionSelector& selector, int side,
               geometry::InspectedArea area, RandomStream& rng) {
  return rise_mask(selector, side, area, draw_shift(side, area, rng));
}

}  // namespace vrise::masking
