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
#include <string>
#include <vector>

#include "vrise/rng.hpp"

namespace vrise::gridgen {

// Binary choice of which cells stay visible (1) for one mask.
struct OcclusionSelector {
  std::vector<std::uint8_t> bits;
  double target_p1 = 0.0;
  // Set when the caller asked for p1 = 0 or p1 = 1 from a guaranteed
  // generator: the constant output is intended, not a guarantee failure.
  bool explicitly_uninformative = false;

  std::size_t size() const { return bits.size(); }
  std::size_t fill_count() const;
  double fill_rate() const;
  // All-occluded or all-visible.
  bool is_uninformative() const;
};

enum class Generator { kThreshold, kCoordinate, kPermutation, kHybrid };

// A selector generator. For kHybrid, `base` and `fixer` name the two
// non-hybrid generators and `p_u_threshold` gates the informativeness check.
struct GeneratorKind {
  Generator kind = Generator::kThreshold;
  Generator base = Generator::kThreshold;
  Generator fixer = Generator::kCoordinate;
  double p_u_threshold = 0.0;

  static GeneratorKind threshold() { return {Generator::kThreshold}; }
  static GeneratorKind coordinate() { return {Generator::kCoordinate}; }
  static GeneratorKind permutation() { return {Generator::kPermutation}; }
  static GeneratorKind hybrid(Generator base, Generator fixer,
                              double p_u_threshold);

  void validate() const;

  // "threshold", "coordinate", "permutation" or
  // "hybrid:<base>+<fixer>@<p_u_threshold>".
  std::string to_string() const;
  static GeneratorKind parse(const std::string& text);

  friend bool operator==(const GeneratorKind&, const GeneratorKind&) = default;
};

std::string to_string(Generator g);

// Visible-cell target ceil(n * p1) and occluded-cell target
// floor(n * (1 - p1)), with a 1e-9 guard so that p1 values such as 3 * 0.05
// do not step over an integer boundary through representation error.
std::size_t visible_target(std::size_t n_cells, double p1);
std::size_t occluded_target(std::size_t n_cells, double p1);

// Each cell visible independently with probability p1.
OcclusionSelector threshold_grid(std::size_t n_cells, double p1,
                                 RandomStream& rng);

// Weak guarantee. p1 <= 1/2: ceil(n p1) indices drawn with replacement are
// made visible. p1 > 1/2: start all-visible and occlude max(1,
// floor(n (1-p1))) indices drawn with replacement. Neither all-zero nor
// all-one for 0 < p1 < 1 and n >= 2.
OcclusionSelector coordinate_grid(std::size_t n_cells, double p1,
                                  RandomStream& rng);

// Strong guarantee: exactly ceil(n p1) visible cells, uniformly placed.
OcclusionSelector permutation_grid(std::size_t n_cells, double p1,
                                   RandomStream& rng);

// P_U = p1^n + (1 - p1)^n.
double uninformative_probability(std::size_t n_cells, double p1);

// Generates selector `index` of the batch identified by `master_seed`.
// Non-hybrid kinds use stream (master_seed, kSelector, index). Hybrid uses
// the base generator on that same stream, so with fixing disabled the output
// is bit-identical to the base generator. When fixing is enabled an
// uninformative selector is replaced by fixer draws on
// (master_seed, kFixer, index, round) until informative.
OcclusionSelector make_selector(const GeneratorKind& kind, std::size_t n_cells,
                                double p1, std::uint64_t master_seed,
                                std::uint64_t index);

// Selectors 0..batch-1 of make_selector.
std::vector<OcclusionSelector> generate_batch(const GeneratorKind& kind,
                                              std::size_t n_cells, double p1,
                                              std::uint64_t master_seed,
                                              std::size_t batch);

std::vector<OcclusionSelector> hybrid_grid(Generator base, Generator fixer,
                                           double p_u_threshold,
                                           std::size_t n_cells, double p1,
                                           std::uint64_t master_seed,
                                           std::size_t batch);

// Whether the hybrid generator runs its informativeness check for (n, p1).
bool hybrid_fixing_enabled(double p_u_threshold, std::size_t n_cells, double p1);

// Maximum replacement rounds when the fixer offers no guarantee:
// 10 * ceil(1 / (1 - P_U)).
std::size_t hybrid_round_cap(std::size_t n_cells, double p1);

}  // namespace vrise::gridgen
