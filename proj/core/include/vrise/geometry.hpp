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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vrise/image.hpp"
#include "vrise/rng.hpp"

namespace vrise::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// The H x W region a mesh has to cover; pixel (x, y) has its center at
// (x + 0.5, y + 0.5).
struct InspectedArea {
  int width = 0;
  int height = 0;

  InspectedArea() = default;
  InspectedArea(int w, int h);

  Point center() const { return {width / 2.0, height / 2.0}; }
  // Radius of the circumscribed circle.
  double circumradius() const;
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  friend bool operator==(const InspectedArea&, const InspectedArea&) = default;
};

inline constexpr std::size_t kFencepostCount = 8;
inline constexpr double kDefaultFencepostEpsilon = 1.0;

struct SeedSet {
  std::vector<Point> interior;
  std::array<Point, kFencepostCount> fenceposts{};
};

// n seeds drawn i.i.d. uniform over [0,W) x [0,H). Exact coordinate
// collisions are re-drawn. Fenceposts use the default epsilon.
SeedSet generate_seeds(std::size_t n, InspectedArea area, RandomStream& rng);
SeedSet generate_seeds(std::size_t n, InspectedArea area,
                       std::uint64_t rng_seed);

// Two points on each extension of the area's diagonals, at distances 3r and
// 3r + epsilon from the center (r = circumradius). Any pixel of the area is
// then strictly closer to every interior seed than to any fencepost.
std::array<Point, kFencepostCount> fencepost_points(
    InspectedArea area, double epsilon = kDefaultFencepostEpsilon);

struct Cell {
  Point seed;
  // Counter-clockwise convex polygon. Interior cells are clipped to the
  // area, fencepost cells to a bounding box around the fenceposts.
  std::vector<Point> polygon;
  bool fencepost = false;

  double area() const;
};

// Voronoi tessellation of interior seeds plus fenceposts. Cells
// [0, polygon_count()) belong to the interior seeds in input order, the
// remaining kFencepostCount cells to the fenceposts.
//
// Pixel ownership follows the nearest seed of each pixel center, ties going
// to the lowest seed index; it is computed once at construction.
class VoronoiMesh {
 public:
  const SeedSet& seeds() const { return seeds_; }
  const std::vector<Cell>& cells() const { return cells_; }
  InspectedArea area() const { return area_; }
  std::size_t polygon_count() const { return seeds_.interior.size(); }

  // Index of the owning cell per pixel, row-major.
  std::span<const std::int32_t> ownership() const { return owner_; }
  std::int32_t owner(int x, int y) const {
    return owner_[static_cast<std::size_t>(y) * area_.width + x];
  }

  // Pixel counts per interior cell (the occlusion sizes).
  std::vector<std::size_t> cell_pixel_counts() const;

 private:
  friend VoronoiMesh build_mesh(const SeedSet& seeds, InspectedArea area);

  SeedSet seeds_;
  InspectedArea area_;
  std::vector<Cell> cells_;
  std::vector<std::int32_t> owner_;
};

VoronoiMesh build_mesh(const SeedSet& seeds, InspectedArea area);

// Builds the mesh for stream (master_seed, kMeshSeeds, mesh_index).
VoronoiMesh random_mesh(std::size_t polygons, InspectedArea area,
                        std::uint64_t master_seed, std::uint64_t mesh_index);

// Binary H x W image, 1 where the owning cell is selected.
Image rasterize_cells(const VoronoiMesh& mesh,
                      std::span<const std::size_t> selected);
Image rasterize_cells(const VoronoiMesh& mesh,
                      std::span<const std::uint8_t> selector_bits);

}  // namespace vrise::geometry
