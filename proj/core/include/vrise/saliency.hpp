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
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vrise/archive.hpp"
#include "vrise/classifier.hpp"
#include "vrise/geometry.hpp"
#include "vrise/gridgen.hpp"
#include "vrise/image.hpp"
#include "vrise/masking.hpp"

namespace vrise::saliency {

enum class Algorithm { kRise, kVrise };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& text);

struct ParamSet {
  Algorithm algorithm = Algorithm::kVrise;
  std::size_t n_masks = 1000;
  // Mesh cells (VRISE) or grid cells s*s (RISE; must be a perfect square).
  std::size_t polygons = 49;
  double p1 = 0.5;
  std::size_t meshcount = 100;  // ignored by RISE
  double blur_sigma = 0.0;      // ignored by RISE
  gridgen::GeneratorKind selector = gridgen::GeneratorKind::threshold();
  std::uint64_t master_seed = 0;

  void validate() const;
  // RISE grid side s with s * s == polygons.
  int grid_side() const;

  nlohmann::json to_json() const;
  static ParamSet from_json(const nlohmann::json& j);
  // Stable 16-hex-digit digest of every field except master_seed, so runs
  // of one configuration share it.
  std::string digest() const;
};

struct SaliencyMap {
  Image values;
  ParamSet params;
  std::size_t masks_used = 0;
  int class_id = 0;
  Precision inference_precision = Precision::kFp32;
  bool normalized = false;
};

struct Checkpoint {
  std::size_t masks_used = 0;
  std::vector<SaliencyMap> maps;  // one per requested class
};

struct GenerationOptions {
  std::vector<int> class_ids{0};
  // Mask counts at which to snapshot the map; nullopt selects
  // default_checkpoint_schedule(n_masks). Counts above n_masks are dropped.
  std::optional<std::vector<std::size_t>> checkpoints;
  std::size_t workers = 1;
  std::size_t batch_size = 32;
  Precision inference_precision = Precision::kFp32;
  masking::BorderMode border = masking::BorderMode::kReflect;
  // Post-process every emitted map with min-max normalization.
  bool min_max_normalize = false;
};

struct GenerationResult {
  std::vector<SaliencyMap> maps;  // one per requested class
  std::vector<Checkpoint> checkpoints;
};

// Carries the checkpoints completed before the failure.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(const std::string& what, std::vector<Checkpoint> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<Checkpoint>& partial() const { return partial_; }

 private:
  std::vector<Checkpoint> partial_;
};

std::vector<std::size_t> default_checkpoint_schedule(std::size_t n_masks);

// Produces mask i of a parameter set. Meshes are built once, up front;
// every mask is a pure function of (params, i).
class MaskSource {
 public:
  MaskSource(const ParamSet& params, geometry::InspectedArea area,
             masking::BorderMode border = masking::BorderMode::kReflect,
             std::size_t workers = 1);

  masking::Mask mask(std::size_t index) const;
  const ParamSet& params() const { return params_; }
  const std::vector<geometry::VoronoiMesh>& meshes() const { return meshes_; }

 private:
  ParamSet params_;
  geometry::InspectedArea area_;
  masking::BorderMode border_;
  std::vector<geometry::VoronoiMesh> meshes_;
};

// Weight of one mask: score / fill_rate for VRISE, score / p1 for RISE,
// and 0 for a fully occluded mask.
double mask_weight(const ParamSet& params, double score, double fill_rate);

// Map = mean over masks of weight * mask. Accumulates in double in mask
// order, so the result does not depend on the worker count, and a
// checkpoint at n equals a full run with n_masks = n.
GenerationResult generate_map(const Image& image, const ParamSet& params,
                              Scorer& scorer,
                              const GenerationOptions& options = {});

// (1/N) * sum_i weights[i] * masks[i], accumulated in double.
Image compose(std::span<const Image> masks, std::span<const double> weights);

nlohmann::json map_metadata(const SaliencyMap& map);

void store_maps(const std::filesystem::path& path,
                std::span<const SaliencyMap> maps, StorageDtype dtype);
std::vector<SaliencyMap> load_maps(const std::filesystem::path& path);

}  // namespace vrise::saliency
