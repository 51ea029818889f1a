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
#include <utility>
#include <vector>

#include "vrise/classifier.hpp"
#include "vrise/image.hpp"
#include "vrise/masking.hpp"

namespace vrise::metrics {

// ---------------------------------------------------------------------------
// Alteration Game
//
// The image is altered in steps of `step` pixels, most salient first, moving
// from an initial state toward a final one; the class score is recorded at
// the initial state and after every step.
//
//                 substrate: zeros   substrate: blur
//   constructive  Insert             Sharpen          (substrate -> image)
//   destructive   Remove             Blur             (image -> substrate)
// ---------------------------------------------------------------------------

enum class Entropy { kConstructive, kDestructive };
enum class Substrate { kZeros, kBlur };

struct GameVariant {
  Entropy entropy = Entropy::kDestructive;
  Substrate substrate = Substrate::kZeros;

  static GameVariant insert() { return {Entropy::kConstructive, Substrate::kZeros}; }
  static GameVariant sharpen() { return {Entropy::kConstructive, Substrate::kBlur}; }
  static GameVariant remove() { return {Entropy::kDestructive, Substrate::kZeros}; }
  static GameVariant blur() { return {Entropy::kDestructive, Substrate::kBlur}; }

  // "insert", "sharpen", "remove" or "blur".
  std::string name() const;
  static GameVariant parse(const std::string& name);
  // Lower scores are better for destructive games.
  bool minimizing() const { return entropy == Entropy::kDestructive; }

  friend bool operator==(const GameVariant&, const GameVariant&) = default;
};

struct GameOptions {
  std::size_t step = 224;
  // Blur strength of the blurred substrate.
  double substrate_sigma = 9.0;
  masking::BorderMode border = masking::BorderMode::kReflect;
  Precision precision = Precision::kFp32;
  std::size_t batch_size = 32;
};

struct GameCurve {
  std::vector<double> scores;  // ceil(H*W / step) + 1 entries
  double auc = 0.0;            // mean of scores
};

// Pixel indices (row-major) in descending saliency; equal values keep
// row-major order.
std::vector<std::size_t> saliency_order(const Image& map);

// The substrate image of a variant.
Image game_substrate(const Image& image, Substrate substrate,
                     const GameOptions& options);

// State after `altered` pixels of `order` have been copied from `to` onto
// `from`.
Image game_state(const Image& from, const Image& to,
                 std::span<const std::size_t> order, std::size_t altered);

GameCurve alteration_game(const Image& map, const Image& image, Scorer& scorer,
                          GameVariant variant, int class_id,
                          const GameOptions& options = {});

// Mean of a curve's recorded scores (left-inclusive Riemann sum on [0, 1]).
double area_under_curve(std::span<const double> scores);

// ---------------------------------------------------------------------------
// Pointing Game
// ---------------------------------------------------------------------------

struct BoundingBox {
  int class_id = 0;
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;  // exclusive
  int y1 = 0;  // exclusive

  bool contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
};

struct PixelIndex {
  int y = 0;
  int x = 0;
};

// Most salient pixel; ties go to the lowest row, then the lowest column.
PixelIndex argmax_pixel(const Image& map);

// Hit when the argmax pixel lies in any box of `class_id`. Throws
// std::invalid_argument when no box has that class.
bool pointing_game(const Image& map, std::span<const BoundingBox> boxes,
                   int class_id);

// ---------------------------------------------------------------------------
// Similarity
// ---------------------------------------------------------------------------

// Structural similarity with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, averaged over all fully contained windows. The dynamic range is
// max - min over both inputs jointly; when it is zero (both constant and
// equal) the result is 1. Images smaller than 11 pixels use the largest odd
// window that fits.
double ssim(const Image& a, const Image& b);

// SSIM of every unordered pair, (0,1), (0,2), ..., (M-2,M-1).
std::vector<double> consistency(std::span<const Image> maps);

double convergence(const Image& map, const Image& reference);

// ---------------------------------------------------------------------------
// Improvement deltas
// ---------------------------------------------------------------------------

enum class DeltaKind { kAbs, kRel, kNorm };

inline constexpr double kDefaultNormEpsilon = 1e-6;

// absΔ = X - R; relΔ = (X - R) / R; normΔ scales by the room left above R
// when X >= R and by R itself otherwise, so it stays in [-1, 1] for inputs
// in [0, 1].
double delta(DeltaKind kind, double x, double reference,
             double epsilon = kDefaultNormEpsilon);

// 1 - score, for folding minimizing metrics into maximizing ones.
double adjust_minimizing(double score);

}  // namespace vrise::metrics
