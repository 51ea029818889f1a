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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "vrise/geometry.hpp"
#include "vrise/rng.hpp"

namespace vrise::geometry {
namespace {

// Brute-force nearest seed over interior seeds then fenceposts.
int nearest_seed(const SeedSet& seeds, Point p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  int index = 0;
  for (const Point& s : seeds.interior) {
    const double d = squared_distance(s, p);
    if (d < best_d) {
      best_d = d;
      best = index;
    }
    ++index;
  }
  for (const Point& s : seeds.fenceposts) {
    const double d = squared_distance(s, p);
    if (d < best_d) {
      best_d = d;
      best = index;
    }
    ++index;
  }
  return best;
}

bool inside_convex(const std::vector<Point>& poly, Point p, double tol) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross < -tol) return false;
  }
  return true;
}

TEST(InspectedAreaTest, Basics) {
  const InspectedArea area(224, 224);
  EXPECT_NEAR(area.circumradius(), 112.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(area.pixel_count(), 224u * 224u);
  EXPECT_THROW(InspectedArea(0, 5), std::invalid_argument);
}

TEST(FencepostTest, DistancesAlongDiagonals) {
  const InspectedArea area(224, 224);
  const auto posts = fencepost_points(area);
  const Point c = area.center();
  int near = 0;
  int far = 0;
  for (const Point& p : posts) {
    const double d = std::sqrt(squared_distance(p, c));
    if (std::abs(d - 475.176) < 1e-3) ++near;
    if (std::abs(d - 476.176) < 1e-3) ++far;
    EXPECT_NEAR(std::abs(p.x - c.x), std::abs(p.y - c.y), 1e-9);
  }
  EXPECT_EQ(near, 4);
  EXPECT_EQ(far, 4);
  EXPECT_THROW(fencepost_points(area, 0.0), std::invalid_argument);
}

TEST(SeedTest, InsideDistinctAndDeterministic) {
  const InspectedArea area(64, 48);
  const SeedSet a = generate_seeds(200, area, 11);
  const SeedSet b = generate_seeds(200, area, 11);
  ASSERT_EQ(a.interior.size(), 200u);
  std::set<std::pair<double, double>> unique;
  for (std::size_t i = 0; i < a.interior.size(); ++i) {
    const Point p = a.interior[i];
    EXPECT_EQ(p, b.interior[i]);
    EXPECT_GE(p.x, 0.0);
    EXPECT_LT(p.x, 64.0);
    EXPECT_GE(p.y, 0.0);
    EXPECT_LT(p.y, 48.0);
    unique.insert({p.x, p.y});
  }
  EXPECT_EQ(unique.size(), 200u);
  EXPECT_NE(generate_seeds(5, area, 12).interior, a.interior);
  EXPECT_THROW(generate_seeds(0, area, 1), std::invalid_argument);
}

TEST(MeshTest, TwoSeedsSplitInHalf) {
  const InspectedArea area(64, 64);
  SeedSet seeds;
  seeds.interior = {{16.0, 32.0}, {48.0, 32.0}};
  seeds.fenceposts = fencepost_points(area);
  const VoronoiMesh mesh = build_mesh(seeds, area);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) EXPECT_EQ(mesh.owner(x, y), x < 32 ? 0 : 1);
  }
  EXPECT_NEAR(mesh.cells()[0].area(), 2048.0, 1e-9);
  EXPECT_NEAR(mesh.cells()[1].area(), 2048.0, 1e-9);
  EXPECT_EQ(mesh.cell_pixel_counts(), (std::vector<std::size_t>{2048, 2048}));
}

TEST(MeshTest, SingleSeedOwnsEverything) {
  const VoronoiMesh mesh = random_mesh(1, InspectedArea(20, 10), 3, 0);
  for (auto o : mesh.ownership()) EXPECT_EQ(o, 0);
  EXPECT_NEAR(mesh.cells()[0].area(), 200.0, 1e-9);
}

class MeshOracleTest : public ::testing::TestWithParam<std::size_t> {};

TEST_P(MeshOracleTest, MatchesBruteForceNearestSeed) {
  const std::size_t n = GetParam();
  const InspectedArea area(48, 40);
  for (std::uint64_t m = 0; m < 10; ++m) {
    const VoronoiMesh mesh = random_mesh(n, area, 77, m);
    ASSERT_EQ(mesh.polygon_count(), n);
    ASSERT_EQ(mesh.cells().size(), n + kFencepostCount);
    double interior_area = 0.0;
    for (std::size_t c = 0; c < n; ++c) interior_area += mesh.cells()[c].area();
    EXPECT_NEAR(interior_area, 48.0 * 40.0, 1e-6);
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 48; ++x) {
        const Point p{x + 0.5, y + 0.5};
        const int owner = mesh.owner(x, y);
        ASSERT_EQ(owner, nearest_seed(mesh.seeds(), p));
        ASSERT_LT(owner, static_cast<int>(n));
        EXPECT_TRUE(inside_convex(mesh.cells()[owner].polygon, p, 1e-6));
      }
    }
    const auto counts = mesh.cell_pixel_counts();
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}),
              area.pixel_count());
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, MeshOracleTest,
                         ::testing::Values(1, 2, 5, 16, 49, 100, 400));

TEST(MeshTest, RejectsBadSeedSets) {
  const InspectedArea area(32, 32);
  SeedSet seeds;
  seeds.fenceposts = fencepost_points(area);
  EXPECT_THROW(build_mesh(seeds, area), std::invalid_argument);
  seeds.interior = {{40.0, 1.0}};
  EXPECT_THROW(build_mesh(seeds, area), std::invalid_argument);
  seeds.interior = {{3.0, 3.0}, {3.0, 3.0}};
  EXPECT_THROW(build_mesh(seeds, area), std::invalid_argument);
  seeds.interior = {{3.0, 3.0}};
  seeds.fenceposts[0] = {-1.0, -1.0};
  EXPECT_THROW(build_mesh(seeds, area), std::invalid_argument);
}

TEST(RasterizeTest, SelectedCellsAndBits) {
  const InspectedArea area(64, 64);
  SeedSet seeds;
  seeds.interior = {{16.0, 32.0}, {48.0, 32.0}};
  seeds.fenceposts = fencepost_points(area);
  const VoronoiMesh mesh = build_mesh(seeds, area);
  const std::vector<std::size_t> second{1};
  const Image right = rasterize_cells(mesh, std::span<const std::size_t>(second));
  EXPECT_EQ(right.at(5, 10), 0.0f);
  EXPECT_EQ(right.at(5, 40), 1.0f);
  EXPECT_DOUBLE_EQ(right.mean(), 0.5);
  const std::vector<std::uint8_t> bits{1, 1};
  EXPECT_DOUBLE_EQ(rasterize_cells(mesh, std::span<const std::uint8_t>(bits)).mean(), 1.0);
  const std::vector<std::size_t> bad{2};
  EXPECT_THROW(rasterize_cells(mesh, std::span<const std::size_t>(bad)),
               std::invalid_argument);
  const std::vector<std::uint8_t> short_bits{1};
  EXPECT_THROW(rasterize_cells(mesh, std::span<const std::uint8_t>(short_bits)),
               std::invalid_argument);
}

}  // namespace
}  // namespace vrise::geometry
