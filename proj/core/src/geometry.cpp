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

#include "vrise/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vrise::geometry {
namespace {

// Keeps the part of `poly` satisfying dot(normal, p) <= offset.
std::vector<Point> clip_half_plane(const std::vector<Point>& poly,
                                   Point normal, double offset) {
  std::vector<Point> out;
  if (poly.empty()) return out;
  out.reserve(poly.size() + 1);
  auto side = [&](Point p) { return normal.x * p.x + normal.y * p.y - offset; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    const double sa = side(a);
    const double sb = side(b);
    if (sa <= 0.0) out.push_back(a);
    if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
      const double t = sa / (sa - sb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

std::vector<Point> rectangle(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

double max_vertex_distance(const std::vector<Point>& poly, Point from) {
  double best = 0.0;
  for (const Point& p : poly) best = std::max(best, squared_distance(p, from));
  return std::sqrt(best);
}

void validate_seeds(const SeedSet& seeds, InspectedArea area) {
  if (seeds.interior.empty()) {
    throw std::invalid_argument("build_mesh: at least one interior seed needed");
  }
  for (const Point& p : seeds.interior) {
    if (!(p.x >= 0.0 && p.x < area.width && p.y >= 0.0 && p.y < area.height)) {
      throw std::invalid_argument("build_mesh: interior seed outside area");
    }
  }
  const double min_fence = 3.0 * area.circumradius() * (1.0 - 1e-9);
  for (const Point& f : seeds.fenceposts) {
    if (std::sqrt(squared_distance(f, area.center())) < min_fence) {
      throw std::invalid_argument(
          "build_mesh: fencepost closer than 3r to the area center");
    }
  }
  std::vector<Point> sorted(seeds.interior.begin(), seeds.interior.end());
  sorted.insert(sorted.end(), seeds.fenceposts.begin(), seeds.fenceposts.end());
  std::sort(sorted.begin(), sorted.end(), [](Point a, Point b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("build_mesh: duplicate seed points");
  }
}

}  // namespace

InspectedArea::InspectedArea(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1) {
    throw std::invalid_argument("InspectedArea: width and height must be >= 1");
  }
}

double InspectedArea::circumradius() const {
  return 0.5 * std::hypot(static_cast<double>(width),
                          static_cast<double>(height));
}

std::array<Point, kFencepostCount> fencepost_points(InspectedArea area,
                                                     double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("fencepost_points: epsilon must be positive");
  }
  const Point c = area.center();
  const double r = area.circumradius();
  const double ux = area.width / (2.0 * r);
  const double uy = area.height / (2.0 * r);
  const std::array<Point, 4> directions{
      {{-ux, -uy}, {ux, -uy}, {ux, uy}, {-ux, uy}}};
  std::array<Point, kFencepostCount> out{};
  std::size_t k = 0;
  for (const Point& d : directions) {
    for (double dist : {3.0 * r, 3.0 * r + epsilon}) {
      out[k++] = {c.x + dist * d.x, c.y + dist * d.y};
    }
  }
  return out;
}

SeedSet generate_seeds(std::size_t n, InspectedArea area, RandomStream& rng) {
  if (n == 0) throw std::invalid_argument("generate_seeds: n must be >= 1");
  SeedSet seeds;
  seeds.interior.reserve(n);
  std::vector<Point> taken;
  taken.reserve(n);
  auto less = [](Point a, Point b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  };
  while (seeds.interior.size() < n) {
    const Point p{rng.uniform() * area.width, rng.uniform() * area.height};
    if (p.x >= area.width || p.y >= area.height) continue;
    auto it = std::lower_bound(taken.begin(), taken.end(), p, less);
    if (it != taken.end() && *it == p) continue;
    taken.insert(it, p);
    seeds.interior.push_back(p);
  }
  seeds.fenceposts = fencepost_points(area);
  return seeds;
}

SeedSet generate_seeds(std::size_t n, InspectedArea area,
                       std::uint64_t rng_seed) {
  RandomStream rng(rng_seed, StreamDomain::kMeshSeeds, 0);
  return generate_seeds(n, area, rng);
}

double Cell::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point a = polygon[i];
    const Point b = polygon[(i + 1) % polygon.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

VoronoiMesh build_mesh(const SeedSet& seeds, InspectedArea area) {
  validate_seeds(seeds, area);

  VoronoiMesh mesh;
  mesh.seeds_ = seeds;
  mesh.area_ = area;

  std::vector<Point> all(seeds.interior.begin(), seeds.interior.end());
  all.insert(all.end(), seeds.fenceposts.begin(), seeds.fenceposts.end());
  const std::size_t n_interior = seeds.interior.size();
  const std::size_t n_all = all.size();

  double outer = 0.0;
  for (const Point& f : seeds.fenceposts) {
    outer = std::max(outer, std::sqrt(squared_distance(f, area.center())));
  }
  outer *= 2.0;
  const Point c = area.center();

  std::vector<std::size_t> order(n_all);
  mesh.cells_.resize(n_all);
  for (std::size_t i = 0; i < n_all; ++i) {
    Cell& cell = mesh.cells_[i];
    cell.seed = all[i];
    cell.fencepost = i >= n_interior;
    cell.polygon = cell.fencepost
                       ? rectangle(c.x - outer, c.y - outer, c.x + outer,
                                   c.y + outer)
                       : rectangle(0.0, 0.0, area.width, area.height);

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return squared_distance(all[a], all[i]) < squared_distance(all[b], all[i]);
    });
    const Point s = all[i];
    const double s_norm = s.x * s.x + s.y * s.y;
    for (std::size_t j : order) {
      if (j == i) continue;
      const Point t = all[j];
      // Once the bisector lies beyond the farthest vertex, so do all the
      // remaining (farther) seeds' bisectors.
      if (0.5 * std::sqrt(squared_distance(s, t)) >
          max_vertex_distance(cell.polygon, s)) {
        break;
      }
      const Point normal{t.x - s.x, t.y - s.y};
      const double offset = 0.5 * (t.x * t.x + t.y * t.y - s_norm);
      cell.polygon = clip_half_plane(cell.polygon, normal, offset);
      if (cell.polygon.empty()) break;
    }
  }

  // Ownership by nearest seed. Candidate cells are found through a coarse
  // bucket grid over the polygon bounding boxes; a pixel center always lies
  // in its nearest seed's cell, so the candidates include the true owner.
  constexpr int kBucket = 8;
  const int bx = (area.width + kBucket - 1) / kBucket;
  const int by = (area.height + kBucket - 1) / kBucket;
  std::vector<std::vector<std::int32_t>> buckets(
      static_cast<std::size_t>(bx) * by);
  const double slack = 1e-7 * (area.width + area.height);
  for (std::size_t i = 0; i < n_all; ++i) {
    const auto& poly = mesh.cells_[i].polygon;
    if (poly.empty()) continue;
    double x0 = poly[0].x, x1 = poly[0].x, y0 = poly[0].y, y1 = poly[0].y;
    for (const Point& p : poly) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    // Pixel centers sit at k + 0.5; bucket of a center is floor(k / B).
    auto first = [&](double v, int limit) {
      const double k = std::ceil(v - slack - 0.5);
      return std::clamp(static_cast<int>(std::clamp(k, 0.0, 1e9)) / kBucket, 0,
                        limit - 1);
    };
    auto last = [&](double v, int limit) {
      const double k = std::floor(v + slack - 0.5);
      if (k < 0.0) return -1;
      return std::min(static_cast<int>(std::min(k, 1e9)) / kBucket, limit - 1);
    };
    const int gx0 = first(x0, bx), gx1 = last(x1, bx);
    const int gy0 = first(y0, by), gy1 = last(y1, by);
    for (int gy = gy0; gy <= gy1; ++gy) {
      for (int gx = gx0; gx <= gx1; ++gx) {
        buckets[static_cast<std::size_t>(gy) * bx + gx].push_back(
            static_cast<std::int32_t>(i));
      }
    }
  }

  mesh.owner_.assign(area.pixel_count(), -1);
  for (int y = 0; y < area.height; ++y) {
    for (int x = 0; x < area.width; ++x) {
      const Point p{x + 0.5, y + 0.5};
      const auto& candidates =
          buckets[static_cast<std::size_t>(y / kBucket) * bx + x / kBucket];
      std::int32_t best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::int32_t k : candidates) {
        const double d = squared_distance(p, all[k]);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best < 0) {
        for (std::size_t k = 0; k < n_all; ++k) {
          const double d = squared_distance(p, all[k]);
          if (d < best_d) {
            best_d = d;
            best = static_cast<std::int32_t>(k);
          }
        }
      }
      mesh.owner_[static_cast<std::size_t>(y) * area.width + x] = best;
    }
  }
  return mesh;
}

std::vector<std::size_t> VoronoiMesh::cell_pixel_counts() const {
  std::vector<std::size_t> counts(polygon_count(), 0);
  for (std::int32_t k : owner_) {
    if (k >= 0 && static_cast<std::size_t>(k) < counts.size()) ++counts[k];
  }
  return counts;
}

VoronoiMesh random_mesh(std::size_t polygons, InspectedArea area,
                        std::uint64_t master_seed, std::uint64_t mesh_index) {
  RandomStream rng(master_seed, StreamDomain::kMeshSeeds, mesh_index);
  return build_mesh(generate_seeds(polygons, area, rng), area);
}

Image rasterize_cells(const VoronoiMesh& mesh,
                      std::span<const std::size_t> selected) {
  std::vector<std::uint8_t> bits(mesh.polygon_count(), 0);
  for (std::size_t k : selected) {
    if (k >= bits.size()) {
      throw std::invalid_argument("rasterize_cells: cell index " +
                                  std::to_string(k) + " out of range (N_p=" +
                                  std::to_string(bits.size()) + ")");
    }
    bits[k] = 1;
  }
  return rasterize_cells(mesh, std::span<const std::uint8_t>(bits));
}

Image rasterize_cells(const VoronoiMesh& mesh,
                      std::span<const std::uint8_t> selector_bits) {
  if (selector_bits.size() != mesh.polygon_count()) {
    throw std::invalid_argument("rasterize_cells: selector length " +
                                std::to_string(selector_bits.size()) +
                                " != N_p " +
                                std::to_string(mesh.polygon_count()));
  }
  const InspectedArea area = mesh.area();
  Image out(area.height, area.width, 1);
  auto dst = out.data();
  const auto owner = mesh.ownership();
  for (std::size_t p = 0; p < owner.size(); ++p) {
    const std::int32_t k = owner[p];
    dst[p] = (k >= 0 && static_cast<std::size_t>(k) < selector_bits.size() &&
              selector_bits[k])
                 ? 1.0f
                 : 0.0f;
  }
  return out;
}

}  // namespace vrise::geometry
