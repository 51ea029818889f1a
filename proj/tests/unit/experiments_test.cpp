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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "vrise/experiments.hpp"

namespace vrise::experiments {
namespace {

namespace fs = std::filesystem;

CorpusOptions small_corpus() {
  CorpusOptions o;
  o.height = 24;
  o.width = 24;
  o.channels = 1;
  return o;
}

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.p1_values = {0.25, 0.5};
  spec.polygons = {4, 9};
  spec.meshcounts = {3};
  spec.sigmas = {0.0};
  spec.n_masks = 40;
  spec.runs = 2;
  spec.metrics = {"pointing"};
  spec.master_seed = 11;
  return spec;
}

TEST(CorpusTest, SyntheticItemsAreDeterministic) {
  const auto a = synthetic_item(3, 5, small_corpus());
  const auto b = synthetic_item(3, 5, small_corpus());
  EXPECT_EQ(a.id, "synthetic-3-5");
  EXPECT_EQ(a.image, b.image);
  ASSERT_EQ(a.boxes.size(), 1u);
  ASSERT_EQ(a.oracle.targets.size(), 1u);
  const auto& box = a.boxes.front();
  const auto& rect = a.oracle.targets.front();
  EXPECT_EQ(box.x0, rect.x0);
  EXPECT_EQ(box.y1, rect.y1);
  EXPECT_GE(a.image.min_value(), 0.25f);
  EXPECT_NE(synthetic_item(3, 6, small_corpus()).image, a.image);
  EXPECT_EQ(instance_bin(1), "single");
  EXPECT_EQ(instance_bin(3), "few");
  EXPECT_EQ(instance_bin(9), "many");
}

TEST(SpecTest, GridReferencesAndValidation) {
  ExperimentSpec spec = small_spec();
  EXPECT_EQ(spec.grid().size(), 4u);
  EXPECT_TRUE(spec.references().empty());
  spec.rise_reference = true;
  const auto refs = spec.references();
  ASSERT_EQ(refs.size(), 4u);
  for (const auto& r : refs) {
    EXPECT_EQ(r.algorithm, saliency::Algorithm::kRise);
    EXPECT_EQ(r.meshcount, 0u);
  }
  EXPECT_NO_THROW(spec.validate());
  ExperimentSpec bad = small_spec();
  bad.metrics = {"consistency"};
  bad.runs = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = small_spec();
  bad.metrics = {"pointing", "pointing"};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = small_spec();
  bad.metrics = {"accuracy"};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = small_spec();
  bad.checkpoints = std::vector<std::size_t>{10, 80};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_NE(run_seed(1, 0), run_seed(1, 1));
  EXPECT_NE(run_seed(1, 0), run_seed(2, 0));
}

TEST(SweepTest, RowCountAndResume) {
  const auto items = synthetic_corpus(5, 1, small_corpus());
  const ExperimentSpec spec = small_spec();
  const fs::path path = fs::temp_directory_path() / "vrise_sweep_journal.jsonl";
  fs::remove(path);
  std::vector<ResultRow> first;
  {
    Journal journal(path);
    first = run_sweep(spec, items, oracle_factory(), journal);
  }
  ASSERT_EQ(first.size(), 8u);  // 2 x 2 x 1 x 1 sets, 2 runs
  std::set<std::string> keys;
  for (const auto& r : first) {
    EXPECT_FALSE(r.failed()) << r.error;
    EXPECT_TRUE(r.value == 0.0 || r.value == 1.0);
    keys.insert(r.key());
  }
  EXPECT_EQ(keys.size(), 8u);

  Journal again(path);
  const auto second = run_sweep(spec, items, oracle_factory(), again);
  EXPECT_EQ(second, first);
  EXPECT_EQ(read_jsonl(path).size(), 8u);
}

TEST(SweepTest, WorkerCountDoesNotChangeRows) {
  const auto items = synthetic_corpus(6, 2, small_corpus());
  ExperimentSpec spec = small_spec();
  spec.metrics = {"remove", "consistency"};
  spec.p1_values = {0.5};
  spec.polygons = {9};
  Journal a;
  Journal b;
  run_sweep(spec, items, oracle_factory(), a);
  spec.workers = 3;
  run_sweep(spec, items, oracle_factory(), b);
  auto ra = a.rows();
  auto rb = b.rows();
  auto by_key = [](const ResultRow& x, const ResultRow& y) { return x.key() < y.key(); };
  std::sort(ra.begin(), ra.end(), by_key);
  std::sort(rb.begin(), rb.end(), by_key);
  EXPECT_EQ(ra, rb);
  ASSERT_EQ(ra.size(), 2u * (2 + 1));
  for (const auto& r : ra) {
    if (r.metric == "consistency") {
      EXPECT_EQ(r.run, kAggregateRun);
      EXPECT_GT(r.value, -1.0);
      EXPECT_LE(r.value, 1.0);
    }
  }
}

TEST(SweepTest, CheckpointsAndRiseReferences) {
  const auto items = synthetic_corpus(7, 1, small_corpus());
  ExperimentSpec spec = small_spec();
  spec.p1_values = {0.5};
  spec.polygons = {4};
  spec.runs = 1;
  spec.checkpoints = std::vector<std::size_t>{20, 40};
  spec.metrics = {"insert"};
  spec.rise_reference = true;
  Journal journal;
  const auto rows = run_sweep(spec, items, oracle_factory(), journal);
  ASSERT_EQ(rows.size(), 4u);  // (vrise, rise) x 2 checkpoints
  std::size_t rise = 0;
  for (const auto& r : rows) rise += r.algorithm == "rise";
  EXPECT_EQ(rise, 2u);
  const auto report = delta_report(rows, items);
  // 2 joins x 2 aggregations, plus one bin row each.
  EXPECT_EQ(report.size(), 8u);
}

TEST(SweepTest, FailuresBecomeNanRows) {
  const auto items = synthetic_corpus(8, 1, small_corpus());
  ExperimentSpec spec = small_spec();
  spec.runs = 1;
  spec.p1_values = {0.5};
  spec.polygons = {4};
  Journal journal;
  ScorerFactory broken = [](const CorpusItem&) -> std::shared_ptr<Scorer> {
    throw ScorerError("offline");
  };
  const auto rows = run_sweep(spec, items, broken, journal);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(std::isnan(rows[0].value));
  EXPECT_NE(rows[0].error.find("offline"), std::string::npos);
}

ResultRow join_row(const std::string& algorithm, const std::string& metric, int run,
                   double value) {
  ResultRow r;
  r.digest = algorithm == "vrise" ? "vvvv" : "rrrr";
  r.image_id = "img";
  r.algorithm = algorithm;
  r.metric = metric;
  r.run = run;
  r.value = value;
  r.n_masks = 100;
  r.p1 = 0.5;
  r.polygons = 16;
  return r;
}

const ResultRow* find_metric(const std::vector<ResultRow>& rows, const std::string& image,
                             const std::string& metric) {
  for (const auto& r : rows) {
    if (r.image_id == image && r.metric == metric) return &r;
  }
  return nullptr;
}

TEST(DeltaReportTest, HandComputedValues) {
  const std::vector<ResultRow> rows{
      join_row("vrise", "insert", 0, 0.6), join_row("vrise", "insert", 1, 0.3),
      join_row("rise", "insert", 0, 0.5),  join_row("rise", "insert", 1, 0.6),
      join_row("vrise", "remove", 0, 0.2), join_row("rise", "remove", 0, 0.4),
  };
  CorpusItem item;
  item.id = "img";
  item.boxes.resize(3);
  const auto report = delta_report(rows, {item});

  const auto* mor = find_metric(report, "img", "reldelta:insert:mean_of_runs");
  ASSERT_NE(mor, nullptr);
  EXPECT_NEAR(mor->value, (0.2 - 0.5) / 2, 1e-12);
  const auto* om = find_metric(report, "img", "reldelta:insert:of_means");
  ASSERT_NE(om, nullptr);
  EXPECT_NEAR(om->value, 0.45 / 0.55 - 1.0, 1e-12);
  EXPECT_EQ(om->run, kAggregateRun);
  const auto* rm = find_metric(report, "img", "reldelta:remove:of_means");
  ASSERT_NE(rm, nullptr);
  EXPECT_NEAR(rm->value, 0.8 / 0.6 - 1.0, 1e-12);
  const auto* bin = find_metric(report, "bin:few", "reldelta:insert:of_means");
  ASSERT_NE(bin, nullptr);
  EXPECT_NEAR(bin->value, om->value, 1e-12);
}

TEST(DeltaReportTest, ZeroReferenceIsFlagged) {
  const std::vector<ResultRow> rows{join_row("vrise", "insert", 0, 0.6),
                                    join_row("rise", "insert", 0, 0.0)};
  const auto report = delta_report(rows, {});
  ASSERT_EQ(report.size(), 2u);
  for (const auto& r : report) EXPECT_TRUE(r.failed());
}

TEST(SigmaMatchTest, DefaultsCoverTheGridSizes) {
  const SigmaMatchSpec spec;
  EXPECT_EQ(spec.sides, (std::vector<int>{4, 5, 7, 9}));
  for (double s : {15.0, 12.0, 9.0, 7.0}) {
    EXPECT_NE(std::find(spec.sigmas.begin(), spec.sigmas.end(), s), spec.sigmas.end());
  }
}

TEST(SigmaMatchTest, RanksAndTies) {
  SigmaMatchSpec spec;
  spec.sides = {4};
  spec.p1_values = {0.25, 0.5};
  spec.sigmas = {2.0, 2.0, 6.0};
  spec.samples = 3;
  spec.size = 32;
  const auto result = sigma_matching(spec);
  ASSERT_EQ(result.rows.size(), 6u);
  ASSERT_EQ(result.summaries.size(), 1u);
  EXPECT_EQ(result.summaries[0].winners.size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& a = result.rows[3 * c];
    const auto& b = result.rows[3 * c + 1];
    EXPECT_EQ(a.mean_ssim, b.mean_ssim);
    EXPECT_TRUE(a.tie);
    EXPECT_TRUE(b.tie);
    EXPECT_EQ(a.rank, b.rank);
    EXPECT_EQ(a.mean_rank, b.mean_rank);
    double top1 = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& r = result.rows[3 * c + k];
      EXPECT_GE(r.rank, 1);
      EXPECT_LE(r.mean_ssim, 1.0);
      if (r.rank == 1) {
        EXPECT_EQ(result.summaries[0].winners[c], spec.sigmas[k == 1 ? 0 : k]);
      }
      top1 = std::max(top1, r.top1_frequency);
    }
    EXPECT_GT(top1, 0.0);
  }
  spec.workers = 2;
  const auto parallel = sigma_matching(spec);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    EXPECT_EQ(parallel.rows[i].mean_ssim, result.rows[i].mean_ssim);
  }
}

TEST(Fp16AbTest, AllFp32CombinationHasZeroDelta) {
  const auto items = synthetic_corpus(9, 2, small_corpus());
  Fp16AbSpec spec;
  spec.params.n_masks = 30;
  spec.params.polygons = 9;
  spec.params.meshcount = 3;
  spec.game.step = 16;
  const auto result = fp16_ab(spec, items, oracle_factory());
  EXPECT_EQ(result.rows.size(), 2u * 8 * 2);
  ASSERT_EQ(result.stats.size(), 16u);
  for (const auto& s : result.stats) {
    EXPECT_EQ(s.samples + s.skipped, 2u);
    if (s.precision == PrecisionTuple{}) {
      EXPECT_EQ(s.mean, 0.0);
      EXPECT_EQ(s.stddev, 0.0);
      EXPECT_EQ(s.min, 0.0);
      EXPECT_EQ(s.max, 0.0);
      EXPECT_EQ(s.share_within_5pct, s.samples ? 1.0 : 0.0);
    }
    EXPECT_LE(std::abs(s.mean), 0.05) << s.precision.to_string() << " " << s.variant;
  }
}

TEST(ConvergenceTest, Smoke) {
  const auto item = synthetic_item(10, 0, small_corpus());
  auto scorer = oracle_factory()(item);
  ConvergenceSpec spec;
  spec.n_schedule = {40, 20};
  spec.maps = 3;
  spec.n_ref = 100;
  const auto points = guarantee_convergence_study(spec, item, *scorer);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].n_masks, 20u);
  EXPECT_EQ(points[1].n_masks, 40u);
  for (const auto& p : points) {
    for (double v : {p.guaranteed_to_ref, p.baseline_to_ref, p.guaranteed_consistency,
                     p.baseline_consistency}) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_LE(v, 1.0);
      EXPECT_GE(v, -1.0);
    }
  }
  spec.maps = 1;
  EXPECT_THROW(guarantee_convergence_study(spec, item, *scorer), std::invalid_argument);
}

}  // namespace
}  // namespace vrise::experiments
