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

#include <cstdint>
#include <optional>
#include <vector>

#include "vrise/geometry.hpp"
#include "vrise/gridgen.hpp"
#include "vrise/image.hpp"
#include "vrise/rng.hpp"

namespace vrise::masking {

// How the blur reads beyond the image edge.
//   kReflect:   d c b | a b c d | c b a   (edge pixel not repeated)
//   kSymmetric: c b a | a b c d | d c b
//   kReplicate: a a a | a b c d | d d d
enum class BorderMode { kReflect, kSymmetric, kReplicate };

// Odd kernel edge length for blur strength sigma: the sigma-to-size rule
// round(8 sigma + 1 - fmod(sigma, 2)), bumped to the next odd number when even.
int kernel_length(double sigma);

// Normalized 1-D Gaussian taps of length kernel_length(sigma).
std::vector<float> gaussian_kernel(double sigma);

struct BlurSpec {
  double sigma = 0.0;  // 0 disables blurring
  BorderMode border = BorderMode::kReflect;

  int kernel_edge() const { return sigma > 0.0 ? kernel_length(sigma) : 1; }
};

// Separable Gaussian blur, per channel, clamped to [0, 1]. sigma == 0
// returns the input unchanged.
Image gaussian_blur(const Image& image, double sigma,
                    BorderMode border = BorderMode::kReflect);

struct MaskProvenance {
  enum class Source { kVoronoi, kGrid };
  Source source = Source::kGrid;
  std::int64_t mesh_index = -1;
  int shift_y = 0;
  int shift_x = 0;
  gridgen::OcclusionSelector selector;
};

struct Mask {
  Image pixels;
  double fill_rate = 0.0;  // mean of pixels
  MaskProvenance provenance;
};

Mask make_mask(Image pixels, MaskProvenance provenance);

// Rasterizes the selected cells at native resolution, then blurs.
Mask render_vrise_mask(const geometry::VoronoiMesh& mesh,
                       const gridgen::OcclusionSelector& selector,
                       const BlurSpec& blur);

// Bilinear resize with half-pixel centers and edge clamping.
Image bilinear_upsample(const Image& grid, int out_height, int out_width);

// Duplicates the last row and column: s x s -> (s+1) x (s+1).
Image edge_pad(const Image& grid);

// Reference mask for blur-strength matching: the edge-padded grid resized
// to H x W.
Image alignment_reference(const Image& grid, int height, int width);

// Nearest-cell rendering of an s x s grid at H x W: pixel (x, y) takes cell
// (floor(x s / W), floor(y s / H)).
Image render_grid(const Image& grid, int height, int width);

// Selector bits as an s x s grid, row-major.
Image selector_grid(const gridgen::OcclusionSelector& selector, int side);

struct GridShift {
  int y = 0;
  int x = 0;
};

// RISE mask: the s x s grid is resized to (s+1)C_H x (s+1)C_W with
// C = ceil(H/s), ceil(W/s), and an H x W window is cropped at `shift`
// (each coordinate in [0, C)).
Mask rise_mask(const gridgen::OcclusionSelector& selector, int side,
               geometry::InspectedArea area, GridShift shift);

// Same, with the shift drawn uniformly from [0, C_H) x [0, C_W).
Mask rise_mask(const gridgen::OcclusionSelector& selector, int side,
               geometry::InspectedArea area, RandomStream& rng);

// Uniform shift draw used by rise_mask.
GridShift draw_shift(int side, geometry::InspectedArea area, RandomStream& rng);

}  // namespace vrise::masking
