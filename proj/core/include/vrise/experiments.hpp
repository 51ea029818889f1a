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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vrise/corpus.hpp"
#include "vrise/gridgen.hpp"
#include "vrise/metrics.hpp"
#include "vrise/results.hpp"
#include "vrise/saliency.hpp"

namespace vrise::experiments {

// Scorer used for one corpus item.
using ScorerFactory = std::function<std::shared_ptr<Scorer>(const CorpusItem&)>;

// Region oracle over the item's targets.
ScorerFactory oracle_factory(int num_classes = 2);
// One shared scorer for every item.
ScorerFactory shared_factory(std::shared_ptr<Scorer> scorer);

// Metric names: "pointing", the game variants "insert", "sharpen",
// "remove", "blur" (AuC), and "consistency" (mean pairwise SSIM over runs,
// one aggregate row).
bool is_known_metric(const std::string& name);
// True for metrics where lower is better.
bool metric_minimizing(const std::string& name);

// Seed of run `run` of a sweep with master seed `master`.
std::uint64_t run_seed(std::uint64_t master, std::size_t run);

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct ExperimentSpec {
  saliency::Algorithm algorithm = saliency::Algorithm::kVrise;
  std::vector<double> p1_values{0.5};
  std::vector<std::size_t> polygons{49};
  std::vector<std::size_t> meshcounts{100};
  std::vector<double> sigmas{0.0};
  std::size_t n_masks = 1000;
  gridgen::GeneratorKind selector = gridgen::GeneratorKind::threshold();
  std::uint64_t master_seed = 0;
  std::size_t runs = 1;
  std::vector<std::string> metrics{"pointing"};
  // Mask counts to evaluate; nullopt evaluates n_masks only.
  std::optional<std::vector<std::size_t>> checkpoints;
  PrecisionTuple precision;
  // Adds RISE rows for every (p1, polygons) pair of the grid.
  bool rise_reference = false;
  int class_id = 0;
  metrics::GameOptions game;
  std::size_t workers = 1;
  std::size_t batch_size = 32;
  // When set, final maps are stored here as archives.
  std::optional<std::filesystem::path> archive_dir;

  void validate() const;
  // Cartesian product p1 x polygons x meshcount x sigma.
  std::vector<saliency::ParamSet> grid() const;
  // RISE references, one per distinct (p1, polygons) pair.
  std::vector<saliency::ParamSet> references() const;
  std::vector<std::size_t> evaluation_points() const;
};

// Runs every parameter set x image, all runs per task, and appends rows to
// the journal. Tasks whose rows are all journaled are skipped. Failures
// become rows with a NaN value and an error message. Returns the journal
// rows.
std::vector<ResultRow> run_sweep(const ExperimentSpec& spec,
                                 const std::vector<CorpusItem>& items,
                                 const ScorerFactory& factory, Journal& journal);

// Rows one parameter set produces for one image.
std::vector<ResultRow> evaluate_task(const ExperimentSpec& spec,
                                     const saliency::ParamSet& params,
                                     const CorpusItem& item, Scorer& scorer);

// relΔ of VRISE against RISE rows with equal (image, metric, precision,
// n_masks, p1, polygons). Minimizing metrics are folded with
// adjust_minimizing first. Two aggregations per join:
//   "reldelta:<metric>:mean_of_runs"  mean over runs of per-run relΔ
//   "reldelta:<metric>:of_means"      relΔ of the run means
// plus the mean of each over the images of every instance bin
// (image "bin:single", "bin:few", "bin:many").
std::vector<ResultRow> delta_report(const std::vector<ResultRow>& rows,
                                    const std::vector<CorpusItem>& items);

// ---------------------------------------------------------------------------
// Blur sigma matching
// ---------------------------------------------------------------------------

struct SigmaMatchSpec {
  std::vector<int> sides{4, 5, 7, 9};
  std::vector<double> p1_values{0.25, 0.5, 0.75};
  std::vector<double> sigmas{3.0, 5.0, 7.0, 9.0, 12.0, 15.0, 18.0};
  std::size_t samples = 20;
  int size = 224;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  masking::BorderMode border = masking::BorderMode::kReflect;
};

struct SigmaMatchRow {
  int side = 0;
  double p1 = 0.0;
  double sigma = 0.0;
  double mean_ssim = 0.0;
  double mean_rank = 0.0;   // mean per-sample rank; ties share the best rank
  double top1_frequency = 0.0;
  int rank = 0;             // rank of mean_ssim among the sigmas of (side, p1)
  bool tie = false;         // another sigma has the same mean_ssim
};

struct SigmaMatchSummary {
  int side = 0;
  // Winning sigma per p1 (in p1_values order).
  std::vector<double> winners;
  bool consistent = false;  // same winner for every p1
};

struct SigmaMatchResult {
  std::vector<SigmaMatchRow> rows;
  std::vector<SigmaMatchSummary> summaries;
};

SigmaMatchResult sigma_matching(const SigmaMatchSpec& spec);

// ---------------------------------------------------------------------------
// FP16 A/B
// ---------------------------------------------------------------------------

struct Fp16AbSpec {
  saliency::ParamSet params;
  std::size_t runs = 1;
  std::vector<metrics::GameVariant> variants{metrics::GameVariant::insert(),
                                             metrics::GameVariant::remove()};
  int class_id = 0;
  metrics::GameOptions game;
  std::size_t workers = 1;
  std::size_t batch_size = 32;
};

struct Fp16AbStats {
  PrecisionTuple precision;
  std::string variant;
  std::size_t samples = 0;   // finite rΔ values
  std::size_t skipped = 0;   // zero fp32 reference
  double mean = 0.0;
  double stddev = 0.0;       // population
  double min = 0.0;
  double max = 0.0;
  double share_within_5pct = 0.0;
};

struct Fp16AbResult {
  std::vector<ResultRow> rows;    // AuC per image, run, variant, combination
  std::vector<Fp16AbStats> stats; // per combination and variant
};

// Runs all 8 precision combinations of (generation, storage, game) and
// reports rΔ(AuC) against the all-fp32 combination.
Fp16AbResult fp16_ab(const Fp16AbSpec& spec, const std::vector<CorpusItem>& items,
                     const ScorerFactory& factory);

// ---------------------------------------------------------------------------
// Informativeness guarantee convergence
// ---------------------------------------------------------------------------

struct ConvergenceSpec {
  int side = 4;
  double p1 = 0.125;
  std::vector<std::size_t> n_schedule{100, 300, 1000};
  std::size_t maps = 5;     // maps per group
  std::size_t n_ref = 4000; // masks behind each reference map
  saliency::Algorithm algorithm = saliency::Algorithm::kRise;
  double blur_sigma = 0.0;  // VRISE only
  std::size_t meshcount = 100;
  gridgen::GeneratorKind guaranteed =
      gridgen::GeneratorKind::hybrid(gridgen::Generator::kThreshold,
                                     gridgen::Generator::kCoordinate, 0.0);
  gridgen::GeneratorKind baseline = gridgen::GeneratorKind::threshold();
  std::uint64_t seed = 0;
  int class_id = 0;
  std::size_t workers = 1;
};

struct ConvergencePoint {
  std::size_t n_masks = 0;
  double guaranteed_to_ref = 0.0;   // mean SSIM to the mean reference map
  double baseline_to_ref = 0.0;
  double guaranteed_consistency = 0.0;
  double baseline_consistency = 0.0;
  double consistency_difference() const {
    return guaranteed_consistency - baseline_consistency;
  }
};

// Maps are min-max normalized before comparison. References use the
// guaranteed generator with seeds disjoint from both groups.
std::vector<ConvergencePoint> guarantee_convergence_study(
    const ConvergenceSpec& spec, const CorpusItem& item, Scorer& scorer);

}  // namespace vrise::experiments
