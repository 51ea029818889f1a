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

#include "vrise/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vrise/parallel.hpp"

namespace vrise::saliency {

std::string to_string(Algorithm a) {
  return a == Algorithm::kRise ? "rise" : "vrise";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "rise" || text == "RISE") return Algorithm::kRise;
  if (text == "vrise" || text == "VRISE") return Algorithm::kVrise;
  throw std::invalid_argument("unknown algorithm '" + text + "'");
}

void ParamSet::validate() const {
  if (n_masks < 1) throw std::invalid_argument("ParamSet: n_masks must be >= 1");
  if (polygons < 1) throw std::invalid_argument("ParamSet: polygons must be >= 1");
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw std::invalid_argument("ParamSet: p1 must be in [0, 1]");
  }
  if (!(blur_sigma >= 0.0)) {
    throw std::invalid_argument("ParamSet: blur sigma must be >= 0");
  }
  if (algorithm == Algorithm::kVrise && meshcount < 1) {
    throw std::invalid_argument("ParamSet: meshcount must be >= 1");
  }
  selector.validate();
  if (algorithm == Algorithm::kRise) grid_side();
}

int ParamSet::grid_side() const {
  const auto s = static_cast<std::size_t>(std::llround(std::sqrt(
      static_cast<double>(polygons))));
  if (s * s != polygons) {
    throw std::invalid_argument("ParamSet: RISE needs a square polygon count, got " +
                                std::to_string(polygons));
  }
  return static_cast<int>(s);
}

nlohmann::json ParamSet::to_json() const {
  return {{"algorithm", to_string(algorithm)},
          {"n_masks", n_masks},
          {"polygons", polygons},
          {"p1", p1},
          {"meshcount", meshcount},
          {"blur_sigma", blur_sigma},
          {"selector", selector.to_string()},
          {"master_seed", master_seed}};
}

ParamSet ParamSet::from_json(const nlohmann::json& j) {
  ParamSet p;
  p.algorithm = parse_algorithm(j.value("algorithm", std::string{"vrise"}));
  p.n_masks = j.value("n_masks", p.n_masks);
  p.polygons = j.value("polygons", p.polygons);
  p.p1 = j.value("p1", p.p1);
  p.meshcount = j.value("meshcount", p.meshcount);
  p.blur_sigma = j.value("blur_sigma", p.blur_sigma);
  p.selector = gridgen::GeneratorKind::parse(
      j.value("selector", std::string{"threshold"}));
  p.master_seed = j.value("master_seed", p.master_seed);
  return p;
}

std::string ParamSet::digest() const {
  nlohmann::json j = to_json();
  j.erase("master_seed");
  if (algorithm == Algorithm::kRise) {
    j.erase("meshcount");
    j.erase("blur_sigma");
  }
  // FNV-1a over the canonical (key-sorted) dump.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::size_t> default_checkpoint_schedule(std::size_t n_masks) {
  std::vector<std::size_t> out;
  for (std::size_t c : {std::size_t{100}, std::size_t{300}, std::size_t{1000}}) {
    if (c < n_masks) out.push_back(c);
  }
  out.push_back(n_masks);
  return out;
}

MaskSource::MaskSource(const ParamSet& params, geometry::InspectedArea area,
                       masking::BorderMode border, std::size_t workers)
    : params_(params), area_(area), border_(border) {
  params_.validate();
  if (params_.algorithm == Algorithm::kVrise) {
    meshes_.resize(params_.meshcount);
    parallel_for(params_.meshcount, workers, [&](std::size_t m) {
      meshes_[m] = geometry::random_mesh(params_.polygons, area_,
                                         params_.master_seed, m);
    });
  } else {
    const int side = params_.grid_side();
    if (side > area.width || side > area.height) {
      throw std::invalid_argument("MaskSource: grid side exceeds the image");
    }
  }
}

masking::Mask MaskSource::mask(std::size_t index) const {
  const gridgen::OcclusionSelector selector = gridgen::make_selector(
      params_.selector, params_.polygons, params_.p1, params_.master_seed,
      index);
  if (params_.algorithm == Algorithm::kVrise) {
    const std::size_t m = index % meshes_.size();
    masking::Mask out = masking::render_vrise_mask(
        meshes_[m], selector, {params_.blur_sigma, border_});
    out.provenance.mesh_index = static_cast<std::int64_t>(m);
    return out;
  }
  RandomStream shift_rng(params_.master_seed, StreamDomain::kShift, index);
  return masking::rise_mask(selector, params_.grid_side(), area_, shift_rng);
}

double mask_weight(const ParamSet& params, double score, double fill_rate) {
  if (!(fill_rate > 0.0)) return 0.0;
  if (params.algorithm == Algorithm::kVrise) return score / fill_rate;
  return params.p1 > 0.0 ? score / params.p1 : 0.0;
}

namespace {

SaliencyMap snapshot(const std::vector<double>& sum, std::size_t count,
                     const Image& shape, const ParamSet& params, int class_id,
                     const GenerationOptions& options) {
  SaliencyMap map;
  map.values = Image(shape.height(), shape.width(), 1);
  auto dst = map.values.data();
  for (std::size_t p = 0; p < sum.size(); ++p) {
    dst[p] = static_cast<float>(sum[p] / static_cast<double>(count));
  }
  if (options.min_max_normalize) {
    map.values = normalize_min_max(map.values);
    map.normalized = true;
  }
  map.params = params;
  map.masks_used = count;
  map.class_id = class_id;
  map.inference_precision = options.inference_precision;
  return map;
}

}  // namespace

GenerationResult generate_map(const Image& image, const ParamSet& params,
                              Scorer& scorer,
                              const GenerationOptions& options) {
  params.validate();
  if (image.empty()) throw std::invalid_argument("generate_map: empty image");
  if (options.class_ids.empty()) {
    throw std::invalid_argument("generate_map: no class ids requested");
  }
  const int classes = scorer.num_classes();
  for (int k : options.class_ids) {
    if (k < 0 || k >= classes) {
      throw std::invalid_argument("generate_map: class id " + std::to_string(k) +
                                  " outside scorer range");
    }
  }

  std::vector<std::size_t> schedule =
      options.checkpoints ? *options.checkpoints
                          : default_checkpoint_schedule(params.n_masks);
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  std::erase_if(schedule, [&](std::size_t c) {
    return c == 0 || c > params.n_masks;
  });

  const geometry::InspectedArea area(image.width(), image.height());
  const MaskSource source(params, area, options.border, options.workers);
  const std::size_t pixels = image.pixel_count();
  std::vector<std::vector<double>> sums(options.class_ids.size(),
                                        std::vector<double>(pixels, 0.0));

  GenerationResult result;
  auto next_checkpoint = schedule.begin();
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  std::vector<masking::Mask> masks;
  std::vector<Image> masked;

  for (std::size_t start = 0; start < params.n_masks; start += batch) {
    const std::size_t count = std::min(batch, params.n_masks - start);
    masks.assign(count, {});
    masked.assign(count, {});
    parallel_for(count, options.workers, [&](std::size_t j) {
      masks[j] = source.mask(start + j);
      masked[j] = apply_mask(image, masks[j].pixels);
    });

    std::vector<ConfidenceVector> scores;
    try {
      scores = scorer.score_batch(masked, options.inference_precision);
      if (scores.size() != count) {
        throw ScorerError("scorer returned " + std::to_string(scores.size()) +
                          " vectors for " + std::to_string(count) + " images");
      }
      for (const auto& v : scores) {
        if (static_cast<int>(v.size()) != classes) {
          throw ScorerError("scorer returned a vector of the wrong width");
        }
      }
    } catch (const std::exception& e) {
      throw GenerationError(std::string("map generation aborted: ") + e.what(),
                            std::move(result.checkpoints));
    }

    for (std::size_t j = 0; j < count; ++j) {
      const auto px = masks[j].pixels.data();
      for (std::size_t k = 0; k < options.class_ids.size(); ++k) {
        const double w = mask_weight(params, scores[j][options.class_ids[k]],
                                     masks[j].fill_rate);
        if (w == 0.0) continue;
        auto& sum = sums[k];
        for (std::size_t p = 0; p < pixels; ++p) sum[p] += w * px[p];
      }
      const std::size_t used = start + j + 1;
      if (next_checkpoint != schedule.end() && *next_checkpoint == used) {
        Checkpoint cp;
        cp.masks_used = used;
        for (std::size_t k = 0; k < options.class_ids.size(); ++k) {
          cp.maps.push_back(snapshot(sums[k], used, image, params,
                                     options.class_ids[k], options));
        }
        result.checkpoints.push_back(std::move(cp));
        ++next_checkpoint;
      }
    }
  }

  for (std::size_t k = 0; k < options.class_ids.size(); ++k) {
    result.maps.push_back(snapshot(sums[k], params.n_masks, image, params,
                                   options.class_ids[k], options));
  }
  return result;
}

Image compose(std::span<const Image> masks, std::span<const double> weights) {
  if (masks.empty()) throw std::invalid_argument("compose: no masks");
  if (masks.size() != weights.size()) {
    throw std::invalid_argument("compose: mask and weight counts differ");
  }
  const Image& first = masks.front();
  std::vector<double> sum(first.size(), 0.0);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (!masks[i].same_shape(first)) {
      throw std::invalid_argument("compose: mask shapes differ");
    }
    const auto px = masks[i].data();
    for (std::size_t p = 0; p < sum.size(); ++p) sum[p] += weights[i] * px[p];
  }
  Image out(first.height(), first.width(), first.channels());
  auto dst = out.data();
  const double n = static_cast<double>(masks.size());
  for (std::size_t p = 0; p < sum.size(); ++p) {
    dst[p] = static_cast<float>(sum[p] / n);
  }
  return out;
}

nlohmann::json map_metadata(const SaliencyMap& map) {
  return {{"class_id", map.class_id},
          {"masks_used", map.masks_used},
          {"inference_precision", to_string(map.inference_precision)},
          {"normalized", map.normalized},
          {"paramset", map.params.to_json()},
          {"paramset_digest", map.params.digest()}};
}

void store_maps(const std::filesystem::path& path,
                std::span<const SaliencyMap> maps, StorageDtype dtype) {
  std::vector<Image> planes;
  nlohmann::json entries = nlohmann::json::array();
  for (const SaliencyMap& m : maps) {
    planes.push_back(m.values);
    entries.push_back(map_metadata(m));
  }
  nlohmann::json meta = {{"kind", "saliency_maps"}, {"maps", entries}};
  if (!maps.empty()) meta["paramset_digest"] = maps.front().params.digest();
  store_archive(path, planes, dtype, meta);
}

std::vector<SaliencyMap> load_maps(const std::filesystem::path& path) {
  Archive archive = load_archive(path);
  const auto& entries = archive.metadata.value("maps", nlohmann::json::array());
  if (!entries.is_array() || entries.size() != archive.planes.size()) {
    throw ArchiveError(ArchiveError::Kind::kCorrupt,
                       "archive metadata does not describe its maps");
  }
  std::vector<SaliencyMap> out;
  for (std::size_t i = 0; i < archive.planes.size(); ++i) {
    const auto& e = entries[i];
    SaliencyMap m;
    m.values = std::move(archive.planes[i]);
    m.class_id = e.value("class_id", 0);
    m.masks_used = e.value("masks_used", std::size_t{0});
    m.inference_precision =
        parse_precision(e.value("inference_precision", std::string{"fp32"}));
    m.normalized = e.value("normalized", false);
    if (e.contains("paramset")) m.params = ParamSet::from_json(e["paramset"]);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace vrise::saliency
