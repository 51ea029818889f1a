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

#include "vrise/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "vrise/parallel.hpp"
#include "vrise/rng.hpp"

namespace vrise::experiments {

using saliency::Algorithm;
using saliency::ParamSet;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::vector<std::string> kMetricNames{"pointing", "insert", "sharpen",
                                            "remove",   "blur",   "consistency"};

StorageDtype storage_dtype(Precision p) {
  return p == Precision::kFp16 ? StorageDtype::kF16 : StorageDtype::kF32;
}

ResultRow base_row(const ExperimentSpec& spec, const ParamSet& params,
                   const CorpusItem& item) {
  ResultRow row;
  row.digest = params.digest();
  row.image_id = item.id;
  row.precision = spec.precision;
  row.algorithm = saliency::to_string(params.algorithm);
  row.p1 = params.p1;
  row.polygons = params.polygons;
  if (params.algorithm == Algorithm::kVrise) {
    row.meshcount = params.meshcount;
    row.sigma = params.blur_sigma;
  }
  return row;
}

std::vector<ResultRow> expected_rows(const ExperimentSpec& spec,
                                     const ParamSet& params,
                                     const CorpusItem& item) {
  std::vector<ResultRow> rows;
  const ResultRow base = base_row(spec, params, item);
  for (std::size_t n : spec.evaluation_points()) {
    for (const auto& metric : spec.metrics) {
      if (metric == "consistency") {
        ResultRow r = base;
        r.run = kAggregateRun;
        r.metric = metric;
        r.n_masks = n;
        rows.push_back(std::move(r));
        continue;
      }
      for (std::size_t run = 0; run < spec.runs; ++run) {
        ResultRow r = base;
        r.run = static_cast<int>(run);
        r.metric = metric;
        r.n_masks = n;
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

void fail_row(ResultRow& row, const std::string& message) {
  row.value = kNaN;
  row.error = message.empty() ? "unknown error" : message;
}

std::string archive_name(const ResultRow& base, std::size_t run) {
  std::string id = base.image_id;
  for (char& ch : id) {
    if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  }
  return base.digest + "_" + id + "_r" + std::to_string(run) + ".vrse";
}

std::vector<ResultRow> evaluate(const ExperimentSpec& spec,
                                const ParamSet& params, const CorpusItem& item,
                                Scorer& scorer, std::size_t workers) {
  std::vector<ResultRow> rows = expected_rows(spec, params, item);
  const auto points = spec.evaluation_points();

  // maps[run][checkpoint]; absent when generation failed before it.
  std::vector<std::vector<std::optional<Image>>> maps(
      spec.runs, std::vector<std::optional<Image>>(points.size()));
  std::vector<std::string> failures(spec.runs);

  for (std::size_t run = 0; run < spec.runs; ++run) {
    ParamSet p = params;
    p.master_seed = run_seed(spec.master_seed, run);
    saliency::GenerationOptions options;
    options.class_ids = {spec.class_id};
    options.checkpoints = points;
    options.workers = workers;
    options.batch_size = spec.batch_size;
    options.inference_precision = spec.precision.generation;
    const StorageDtype dtype = storage_dtype(spec.precision.storage);
    auto keep = [&](const std::vector<saliency::Checkpoint>& checkpoints) {
      for (const auto& cp : checkpoints) {
        const auto it = std::find(points.begin(), points.end(), cp.masks_used);
        if (it == points.end()) continue;
        maps[run][static_cast<std::size_t>(it - points.begin())] =
            storage_round_trip(cp.maps.front().values, dtype);
      }
    };
    try {
      const auto result = saliency::generate_map(item.image, p, scorer, options);
      keep(result.checkpoints);
      if (spec.archive_dir) {
        std::filesystem::create_directories(*spec.archive_dir);
        saliency::store_maps(*spec.archive_dir / archive_name(rows.front(), run),
                             result.maps, dtype);
      }
    } catch (const saliency::GenerationError& e) {
      keep(e.partial());
      failures[run] = e.what();
    } catch (const std::exception& e) {
      failures[run] = e.what();
    }
  }

  metrics::GameOptions game = spec.game;
  game.precision = spec.precision.game;
  game.batch_size = spec.batch_size;

  for (ResultRow& row : rows) {
    const std::size_t point = static_cast<std::size_t>(
        std::find(points.begin(), points.end(), row.n_masks) - points.begin());
    try {
      if (row.metric == "consistency") {
        std::vector<Image> group;
        for (std::size_t run = 0; run < spec.runs; ++run) {
          if (!maps[run][point]) {
            throw std::runtime_error("run " + std::to_string(run) +
                                     " has no map: " + failures[run]);
          }
          group.push_back(*maps[run][point]);
        }
        const auto pairs = metrics::consistency(group);
        row.value = std::accumulate(pairs.begin(), pairs.end(), 0.0) /
                    static_cast<double>(pairs.size());
        continue;
      }
      const auto& map = maps[static_cast<std::size_t>(row.run)][point];
      if (!map) throw std::runtime_error(failures[static_cast<std::size_t>(row.run)]);
      if (row.metric == "pointing") {
        row.value = metrics::pointing_game(*map, item.boxes, spec.class_id) ? 1.0 : 0.0;
      } else {
        row.value = metrics::alteration_game(*map, item.image, scorer,
                                             metrics::GameVariant::parse(row.metric),
                                             spec.class_id, game)
                        .auc;
      }
    } catch (const std::exception& e) {
      fail_row(row, e.what());
    }
  }
  return rows;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ScorerFactory oracle_factory(int num_classes) {
  return [num_classes](const CorpusItem& item) -> std::shared_ptr<Scorer> {
    RegionOracleSpec spec = item.oracle;
    spec.num_classes = num_classes;
    return std::make_shared<RegionOracle>(std::move(spec), item.image.height(),
                                          item.image.width());
  };
}

ScorerFactory shared_factory(std::shared_ptr<Scorer> scorer) {
  return [scorer](const CorpusItem&) { return scorer; };
}

bool is_known_metric(const std::string& name) {
  return std::find(kMetricNames.begin(), kMetricNames.end(), name) != kMetricNames.end();
}

bool metric_minimizing(const std::string& name) {
  return name == "remove" || name == "blur";
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run) {
  RandomStream rng(master, StreamDomain::kExperiment, run);
  return rng.next_u64();
}

void ExperimentSpec::validate() const {
  if (p1_values.empty() || polygons.empty() || meshcounts.empty() || sigmas.empty()) {
    throw std::invalid_argument("experiment grid must be non-empty");
  }
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (metrics.empty()) throw std::invalid_argument("no metrics requested");
  for (const auto& m : metrics) {
    if (!is_known_metric(m)) throw std::invalid_argument("unknown metric '" + m + "'");
    if (m == "consistency" && runs < 2) {
      throw std::invalid_argument("consistency needs runs >= 2");
    }
  }
  std::set<std::string> unique(metrics.begin(), metrics.end());
  if (unique.size() != metrics.size()) {
    throw std::invalid_argument("duplicate metric");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  for (const auto& p : grid()) p.validate();
  for (const auto& p : references()) p.validate();
  for (std::size_t n : evaluation_points()) {
    if (n < 1 || n > n_masks) throw std::invalid_argument("checkpoint outside [1, n_masks]");
  }
}

std::vector<ParamSet> ExperimentSpec::grid() const {
  std::vector<ParamSet> out;
  for (double p1 : p1_values) {
    for (std::size_t n_p : polygons) {
      for (std::size_t meshcount : meshcounts) {
        for (double sigma : sigmas) {
          ParamSet p;
          p.algorithm = algorithm;
          p.n_masks = n_masks;
          p.polygons = n_p;
          p.p1 = p1;
          p.meshcount = meshcount;
          p.blur_sigma = sigma;
          p.selector = selector;
          p.master_seed = master_seed;
          out.push_back(p);
        }
      }
    }
  }
  return out;
}

std::vector<ParamSet> ExperimentSpec::references() const {
  std::vector<ParamSet> out;
  if (!rise_reference || algorithm == Algorithm::kRise) return out;
  for (double p1 : p1_values) {
    for (std::size_t n_p : polygons) {
      ParamSet p;
      p.algorithm = Algorithm::kRise;
      p.n_masks = n_masks;
      p.polygons = n_p;
      p.p1 = p1;
      p.meshcount = 0;
      p.blur_sigma = 0.0;
      p.selector = selector;
      p.master_seed = master_seed;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<std::size_t> ExperimentSpec::evaluation_points() const {
  std::vector<std::size_t> points = checkpoints.value_or(std::vector<std::size_t>{n_masks});
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

std::vector<ResultRow> evaluate_task(const ExperimentSpec& spec,
                                     const ParamSet& params,
                                     const CorpusItem& item, Scorer& scorer) {
  return evaluate(spec, params, item, scorer, spec.workers);
}

std::vector<ResultRow> run_sweep(const ExperimentSpec& spec,
                                 const std::vector<CorpusItem>& items,
                                 const ScorerFactory& factory, Journal& journal) {
  spec.validate();
  if (items.empty()) throw std::invalid_argument("run_sweep: no images");
  std::vector<ParamSet> sets = spec.grid();
  for (auto& r : spec.references()) sets.push_back(std::move(r));

  struct Task {
    const ParamSet* params;
    const CorpusItem* item;
  };
  std::vector<Task> tasks;
  for (const auto& p : sets) {
    for (const auto& item : items) {
      const auto expected = expected_rows(spec, p, item);
      const bool done = std::all_of(expected.begin(), expected.end(), [&](const auto& r) {
        return journal.contains(r.key());
      });
      if (!done) tasks.push_back({&p, &item});
    }
  }

  const std::size_t outer = std::min(spec.workers, std::max<std::size_t>(tasks.size(), 1));
  const std::size_t inner = tasks.size() <= 1 ? spec.workers : 1;
  parallel_for(tasks.size(), outer, [&](std::size_t t) {
    const Task& task = tasks[t];
    std::vector<ResultRow> rows;
    try {
      auto scorer = factory(*task.item);
      rows = evaluate(spec, *task.params, *task.item, *scorer, inner);
    } catch (const std::exception& e) {
      rows = expected_rows(spec, *task.params, *task.item);
      for (auto& r : rows) fail_row(r, e.what());
    }
    for (const auto& r : rows) journal.append(r);
  });
  return journal.rows();
}

std::vector<ResultRow> delta_report(const std::vector<ResultRow>& rows,
                                    const std::vector<CorpusItem>& items) {
  using JoinKey = std::tuple<std::string, std::string, std::string, std::size_t,
                             double, std::size_t>;  // image, metric, precision, n, p1, polygons
  auto adjusted = [](const ResultRow& r) {
    return metric_minimizing(r.metric) ? metrics::adjust_minimizing(r.value) : r.value;
  };
  auto join_key = [](const ResultRow& r) {
    return JoinKey{r.image_id, r.metric, r.precision.to_string(), r.n_masks, r.p1, r.polygons};
  };

  std::map<JoinKey, std::map<int, double>> rise;
  for (const auto& r : rows) {
    if (r.failed() || r.algorithm != "rise" || r.metric.rfind("reldelta", 0) == 0) continue;
    rise[join_key(r)][r.run] = adjusted(r);
  }

  // (digest, join key) -> run -> value
  std::map<std::pair<std::string, JoinKey>, std::map<int, double>> vrise;
  std::map<std::pair<std::string, JoinKey>, ResultRow> templates;
  for (const auto& r : rows) {
    if (r.failed() || r.algorithm != "vrise" || r.metric.rfind("reldelta", 0) == 0) continue;
    const auto key = std::make_pair(r.digest, join_key(r));
    vrise[key][r.run] = adjusted(r);
    templates.emplace(key, r);
  }

  std::map<std::string, std::size_t> instances;
  for (const auto& item : items) instances[item.id] = item.boxes.size();

  std::vector<ResultRow> out;
  // (digest, metric, precision, n, aggregation, bin) -> values
  std::map<std::tuple<std::string, std::string, std::string, std::size_t, std::string>,
           std::pair<ResultRow, std::vector<double>>> bins;

  for (const auto& [key, runs] : vrise) {
    const auto ref = rise.find(key.second);
    if (ref == rise.end()) continue;
    std::vector<double> per_run;
    std::vector<double> xs;
    std::vector<double> rs;
    for (const auto& [run, x] : runs) {
      const auto it = ref->second.find(run);
      if (it == ref->second.end()) continue;
      xs.push_back(x);
      rs.push_back(it->second);
      if (it->second != 0.0) per_run.push_back(metrics::delta(metrics::DeltaKind::kRel, x, it->second));
    }
    if (xs.empty()) continue;
    const ResultRow& tmpl = templates.at(key);
    auto emit = [&](const std::string& aggregation, double value, const std::string& error) {
      ResultRow row = tmpl;
      row.run = kAggregateRun;
      row.metric = "reldelta:" + tmpl.metric + ":" + aggregation;
      row.value = error.empty() ? value : kNaN;
      row.error = error;
      out.push_back(row);
      if (!error.empty()) return;
      const auto found = instances.find(tmpl.image_id);
      if (found == instances.end()) return;
      const std::string bin = instance_bin(found->second);
      auto& slot = bins[{tmpl.digest, row.metric, row.precision.to_string(), row.n_masks, bin}];
      if (slot.second.empty()) {
        slot.first = row;
        slot.first.image_id = "bin:" + bin;
      }
      slot.second.push_back(value);
    };
    if (per_run.size() == xs.size()) {
      emit("mean_of_runs", mean_of(per_run), "");
    } else {
      emit("mean_of_runs", 0.0, "zero reference");
    }
    const double rmean = mean_of(rs);
    if (rmean != 0.0) {
      emit("of_means", metrics::delta(metrics::DeltaKind::kRel, mean_of(xs), rmean), "");
    } else {
      emit("of_means", 0.0, "zero reference");
    }
  }
  for (auto& [key, slot] : bins) {
    slot.first.value = mean_of(slot.second);
    out.push_back(slot.first);
  }
  return out;
}

SigmaMatchResult sigma_matching(const SigmaMatchSpec& spec) {
  if (spec.sides.empty() || spec.p1_values.empty() || spec.sigmas.empty() ||
      spec.samples == 0) {
    throw std::invalid_argument("sigma_matching: empty grid");
  }
  for (int s : spec.sides) {
    if (s < 1 || s > spec.size) throw std::invalid_argument("sigma_matching: bad side");
  }
  const std::size_t n_sigma = spec.sigmas.size();
  const std::size_t n_p1 = spec.p1_values.size();
  const std::size_t configs = spec.sides.size() * n_p1;
  // ssim[(config * samples + sample) * n_sigma + k]
  std::vector<double> scores(configs * spec.samples * n_sigma, 0.0);

  parallel_for(configs * spec.samples, spec.workers, [&](std::size_t job) {
    const std::size_t config = job / spec.samples;
    const std::size_t sample = job % spec.samples;
    const int side = spec.sides[config / n_p1];
    const std::size_t pi = config % n_p1;
    RandomStream rng(spec.seed, StreamDomain::kExperiment, sample,
                     (static_cast<std::uint32_t>(side) << 8) | static_cast<std::uint32_t>(pi));
    const auto selector = gridgen::permutation_grid(
        static_cast<std::size_t>(side) * side, spec.p1_values[pi], rng);
    const Image grid = masking::selector_grid(selector, side);
    const Image reference = masking::alignment_reference(grid, spec.size, spec.size);
    const Image hard = masking::render_grid(grid, spec.size, spec.size);
    for (std::size_t k = 0; k < n_sigma; ++k) {
      const double sigma = spec.sigmas[k];
      const Image candidate =
          sigma > 0.0 ? masking::gaussian_blur(hard, sigma, spec.border) : hard;
      scores[job * n_sigma + k] = metrics::ssim(candidate, reference);
    }
  });

  SigmaMatchResult result;
  for (std::size_t si = 0; si < spec.sides.size(); ++si) {
    SigmaMatchSummary summary;
    summary.side = spec.sides[si];
    for (std::size_t pi = 0; pi < n_p1; ++pi) {
      const std::size_t config = si * n_p1 + pi;
      std::vector<double> mean(n_sigma, 0.0);
      std::vector<double> rank_sum(n_sigma, 0.0);
      std::vector<std::size_t> top1(n_sigma, 0);
      for (std::size_t sample = 0; sample < spec.samples; ++sample) {
        const double* row = &scores[(config * spec.samples + sample) * n_sigma];
        for (std::size_t k = 0; k < n_sigma; ++k) {
          std::size_t better = 0;
          for (std::size_t j = 0; j < n_sigma; ++j) better += row[j] > row[k];
          rank_sum[k] += static_cast<double>(better + 1);
          top1[k] += better == 0;
          mean[k] += row[k];
        }
      }
      std::size_t first = result.rows.size();
      for (std::size_t k = 0; k < n_sigma; ++k) {
        SigmaMatchRow r;
        r.side = summary.side;
        r.p1 = spec.p1_values[pi];
        r.sigma = spec.sigmas[k];
        r.mean_ssim = mean[k] / static_cast<double>(spec.samples);
        r.mean_rank = rank_sum[k] / static_cast<double>(spec.samples);
        r.top1_frequency = static_cast<double>(top1[k]) / static_cast<double>(spec.samples);
        result.rows.push_back(r);
      }
      for (std::size_t k = 0; k < n_sigma; ++k) {
        auto& r = result.rows[first + k];
        int better = 0;
        for (std::size_t j = 0; j < n_sigma; ++j) {
          const auto& o = result.rows[first + j];
          better += o.mean_ssim > r.mean_ssim;
          if (j != k && o.mean_ssim == r.mean_ssim) r.tie = true;
        }
        r.rank = better + 1;
      }
      double best_sigma = spec.sigmas.front();
      for (std::size_t k = 0; k < n_sigma; ++k) {
        if (result.rows[first + k].rank == 1) {
          best_sigma = result.rows[first + k].sigma;
          break;
        }
      }
      summary.winners.push_back(best_sigma);
    }
    summary.consistent = std::all_of(summary.winners.begin(), summary.winners.end(),
                                     [&](double w) { return w == summary.winners.front(); });
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

Fp16AbResult fp16_ab(const Fp16AbSpec& spec, const std::vector<CorpusItem>& items,
                     const ScorerFactory& factory) {
  spec.params.validate();
  if (items.empty() || spec.runs < 1 || spec.variants.empty()) {
    throw std::invalid_argument("fp16_ab: nothing to run");
  }
  const auto combos = PrecisionTuple::all();
  struct Cell {
    std::vector<ResultRow> rows;
  };
  std::vector<Cell> cells(items.size() * spec.runs);

  parallel_for(cells.size(), spec.workers, [&](std::size_t t) {
    const CorpusItem& item = items[t / spec.runs];
    const std::size_t run = t % spec.runs;
    auto scorer = factory(item);
    ParamSet params = spec.params;
    params.master_seed = run_seed(spec.params.master_seed, run);
    std::map<Precision, Image> generated;
    for (Precision gen : {Precision::kFp32, Precision::kFp16}) {
      saliency::GenerationOptions options;
      options.class_ids = {spec.class_id};
      options.checkpoints = std::vector<std::size_t>{};
      options.workers = cells.size() == 1 ? spec.workers : 1;
      options.batch_size = spec.batch_size;
      options.inference_precision = gen;
      generated[gen] = saliency::generate_map(item.image, params, *scorer, options)
                           .maps.front()
                           .values;
    }
    for (const auto& combo : combos) {
      const Image stored =
          storage_round_trip(generated.at(combo.generation), storage_dtype(combo.storage));
      metrics::GameOptions game = spec.game;
      game.precision = combo.game;
      game.batch_size = spec.batch_size;
      for (const auto& variant : spec.variants) {
        ResultRow row;
        row.digest = params.digest();
        row.image_id = item.id;
        row.run = static_cast<int>(run);
        row.metric = variant.name();
        row.precision = combo;
        row.algorithm = saliency::to_string(params.algorithm);
        row.n_masks = params.n_masks;
        row.p1 = params.p1;
        row.polygons = params.polygons;
        if (params.algorithm == Algorithm::kVrise) {
          row.meshcount = params.meshcount;
          row.sigma = params.blur_sigma;
        }
        row.value = metrics::alteration_game(stored, item.image, *scorer, variant,
                                             spec.class_id, game)
                        .auc;
        cells[t].rows.push_back(std::move(row));
      }
    }
  });

  Fp16AbResult result;
  for (auto& c : cells) {
    for (auto& r : c.rows) result.rows.push_back(std::move(r));
  }
  std::map<std::tuple<std::string, int, std::string>, double> reference;
  for (const auto& r : result.rows) {
    if (r.precision == PrecisionTuple{}) reference[{r.image_id, r.run, r.metric}] = r.value;
  }
  for (const auto& combo : combos) {
    for (const auto& variant : spec.variants) {
      Fp16AbStats s;
      s.precision = combo;
      s.variant = variant.name();
      std::vector<double> deltas;
      for (const auto& r : result.rows) {
        if (!(r.precision == combo) || r.metric != s.variant) continue;
        const double ref = reference.at({r.image_id, r.run, r.metric});
        if (ref == 0.0) {
          ++s.skipped;
          continue;
        }
        deltas.push_back(metrics::delta(metrics::DeltaKind::kRel, r.value, ref));
      }
      s.samples = deltas.size();
      if (!deltas.empty()) {
        s.mean = mean_of(deltas);
        double var = 0.0;
        for (double d : deltas) var += (d - s.mean) * (d - s.mean);
        s.stddev = std::sqrt(var / static_cast<double>(deltas.size()));
        s.min = *std::min_element(deltas.begin(), deltas.end());
        s.max = *std::max_element(deltas.begin(), deltas.end());
        s.share_within_5pct =
            static_cast<double>(std::count_if(deltas.begin(), deltas.end(),
                                              [](double d) { return std::abs(d) <= 0.05; })) /
            static_cast<double>(deltas.size());
      }
      result.stats.push_back(s);
    }
  }
  return result;
}

std::vector<ConvergencePoint> guarantee_convergence_study(const ConvergenceSpec& spec,
                                                          const CorpusItem& item,
                                                          Scorer& scorer) {
  if (spec.maps < 2 || spec.n_schedule.empty() || spec.n_ref < 1) {
    throw std::invalid_argument("guarantee_convergence_study: bad spec");
  }
  if (!(gridgen::uninformative_probability(static_cast<std::size_t>(spec.side) * spec.side,
                                           spec.p1) > 0.0)) {
    throw std::invalid_argument("guarantee_convergence_study: P_U is zero");
  }
  std::vector<std::size_t> schedule = spec.n_schedule;
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());

  ParamSet base;
  base.algorithm = spec.algorithm;
  base.polygons = static_cast<std::size_t>(spec.side) * spec.side;
  base.p1 = spec.p1;
  base.meshcount = spec.meshcount;
  base.blur_sigma = spec.blur_sigma;

  const std::size_t m = spec.maps;
  // jobs: [0, m) guaranteed, [m, 2m) baseline, [2m, 3m) references
  std::vector<std::vector<Image>> maps(3 * m);
  parallel_for(3 * m, spec.workers, [&](std::size_t job) {
    const std::size_t group = job / m;
    const std::size_t i = job % m;
    ParamSet p = base;
    p.selector = group == 1 ? spec.baseline : spec.guaranteed;
    const std::size_t seed_index = group == 2 ? m + i : i;
    p.master_seed = run_seed(spec.seed, seed_index);
    saliency::GenerationOptions options;
    options.class_ids = {spec.class_id};
    options.workers = 1;
    if (group == 2) {
      p.n_masks = spec.n_ref;
      options.checkpoints = std::vector<std::size_t>{};
    } else {
      p.n_masks = schedule.back();
      options.checkpoints = schedule;
    }
    const auto result = saliency::generate_map(item.image, p, scorer, options);
    if (group == 2) {
      maps[job].push_back(normalize_min_max(result.maps.front().values));
    } else {
      for (std::size_t n : schedule) {
        const auto it = std::find_if(result.checkpoints.begin(), result.checkpoints.end(),
                                     [&](const auto& c) { return c.masks_used == n; });
        maps[job].push_back(normalize_min_max(it->maps.front().values));
      }
    }
  });

  std::vector<Image> refs;
  for (std::size_t i = 0; i < m; ++i) refs.push_back(maps[2 * m + i].front());
  const Image reference = normalize_min_max(
      saliency::compose(refs, std::vector<double>(m, 1.0)));

  std::vector<ConvergencePoint> out;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    ConvergencePoint point;
    point.n_masks = schedule[k];
    std::vector<Image> guaranteed;
    std::vector<Image> baseline;
    for (std::size_t i = 0; i < m; ++i) {
      guaranteed.push_back(maps[i][k]);
      baseline.push_back(maps[m + i][k]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      point.guaranteed_to_ref += metrics::convergence(guaranteed[i], reference);
      point.baseline_to_ref += metrics::convergence(baseline[i], reference);
    }
    point.guaranteed_to_ref /= static_cast<double>(m);
    point.baseline_to_ref /= static_cast<double>(m);
    point.guaranteed_consistency = mean_of(metrics::consistency(guaranteed));
    point.baseline_consistency = mean_of(metrics::consistency(baseline));
    out.push_back(point);
  }
  return out;
}

}  // namespace vrise::experiments
