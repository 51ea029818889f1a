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

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "vrise/remote.hpp"

namespace vrise::cli {

namespace fs = std::filesystem;
using experiments::CorpusItem;
using experiments::PrecisionTuple;
using experiments::ResultRow;
using saliency::Algorithm;
using saliency::ParamSet;

namespace {

StorageDtype storage_dtype(Precision p) {
  return p == Precision::kFp16 ? StorageDtype::kF16 : StorageDtype::kF32;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal CSV table for outputs that are not result rows.
class Table {
 public:
  Table(const fs::path& path, const std::vector<std::string>& columns) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    line(columns);
  }
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void write_results(const fs::path& out, const std::vector<ResultRow>& rows) {
  fs::create_directories(out);
  experiments::write_csv(out / "results.csv", rows);
  experiments::write_jsonl(out / "results.jsonl", rows);
  std::cout << "wrote " << rows.size() << " rows to " << (out / "results.csv").string()
            << "\n";
}

std::string safe_id(std::string id) {
  for (char& ch : id) {
    if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  }
  return id;
}

ResultRow row_for(const ParamSet& params, const CorpusItem& item, int run,
                  const std::string& metric, const PrecisionTuple& precision,
                  std::size_t masks_used) {
  ResultRow row;
  row.digest = params.digest();
  row.image_id = item.id;
  row.run = run;
  row.metric = metric;
  row.precision = precision;
  row.algorithm = saliency::to_string(params.algorithm);
  row.n_masks = masks_used;
  row.p1 = params.p1;
  row.polygons = params.polygons;
  if (params.algorithm == Algorithm::kVrise) {
    row.meshcount = params.meshcount;
    row.sigma = params.blur_sigma;
  }
  return row;
}

metrics::GameOptions game_options(const GameFlags& flags, const RunFlags& run) {
  metrics::GameOptions options;
  options.step = flags.step;
  options.substrate_sigma = flags.substrate_sigma;
  options.precision = run.tuple().game;
  options.batch_size = run.batch_size;
  return options;
}

// Maps of one item: loaded from archives, or generated once per run.
std::vector<saliency::SaliencyMap> obtain_maps(const EvaluateCommand& cmd,
                                               const CorpusItem& item, Scorer& scorer) {
  const PrecisionTuple precision = cmd.run.tuple();
  std::vector<saliency::SaliencyMap> out;
  if (!cmd.maps.maps.empty()) {
    for (const auto& path : cmd.maps.maps) {
      const auto loaded = saliency::load_maps(path);
      const auto it = std::find_if(loaded.begin(), loaded.end(), [&](const auto& m) {
        return m.class_id == cmd.run.class_id;
      });
      if (it == loaded.end()) {
        throw std::invalid_argument(path + ": no map for class " +
                                    std::to_string(cmd.run.class_id));
      }
      out.push_back(*it);
    }
    return out;
  }
  const ParamSet base = cmd.params.params();
  for (std::size_t r = 0; r < cmd.maps.runs; ++r) {
    ParamSet p = base;
    p.master_seed = experiments::run_seed(base.master_seed, r);
    saliency::GenerationOptions options;
    options.class_ids = {cmd.run.class_id};
    options.checkpoints = std::vector<std::size_t>{};
    options.workers = cmd.run.workers;
    options.batch_size = cmd.run.batch_size;
    options.inference_precision = precision.generation;
    auto map = saliency::generate_map(item.image, p, scorer, options).maps.front();
    map.values = storage_round_trip(map.values, storage_dtype(precision.storage));
    out.push_back(std::move(map));
  }
  return out;
}

void check_single_item(const EvaluateCommand& cmd, std::size_t items) {
  if (!cmd.maps.maps.empty() && items != 1) {
    throw std::invalid_argument("--map needs exactly one image");
  }
}

}  // namespace

std::vector<CorpusItem> ImageFlags::load() const {
  if (!image.empty()) {
    if (boxes.empty()) throw std::invalid_argument("--image needs --boxes");
    return {experiments::load_item(image, boxes)};
  }
  experiments::CorpusOptions options;
  options.height = size;
  options.width = size;
  options.channels = channels;
  options.min_instances = min_instances;
  options.max_instances = max_instances;
  return experiments::synthetic_corpus(corpus_seed, synthetic, options);
}

experiments::ScorerFactory ScorerFlags::factory() const {
  if (scorer == "oracle") return experiments::oracle_factory(classes);
  if (scorer.rfind("remote:", 0) == 0) {
    wire::RemoteOptions options;
    options.timeout_ms = timeout_ms;
    auto remote = std::make_shared<wire::RemoteScorer>(
        wire::Endpoint::parse(scorer.substr(7)), options);
    return experiments::shared_factory(std::move(remote));
  }
  throw std::invalid_argument("unknown scorer '" + scorer + "'");
}

ParamSet ParamFlags::params() const {
  ParamSet p;
  p.algorithm = saliency::parse_algorithm(algorithm);
  p.n_masks = n_masks;
  p.polygons = polygons;
  p.p1 = p1;
  p.meshcount = meshcount;
  p.blur_sigma = sigma;
  p.selector = gridgen::GeneratorKind::parse(selector);
  p.master_seed = seed;
  p.validate();
  return p;
}

PrecisionTuple RunFlags::tuple() const { return PrecisionTuple::parse(precision); }

int run_generate(const GenerateCommand& cmd) {
  const auto items = cmd.images.load();
  const auto factory = cmd.scorer.factory();
  const ParamSet params = cmd.params.params();
  const PrecisionTuple precision = cmd.run.tuple();
  const fs::path dir = cmd.run.out / "archives";
  fs::create_directories(dir);
  for (const auto& item : items) {
    auto scorer = factory(item);
    saliency::GenerationOptions options;
    options.class_ids = cmd.classes.empty() ? std::vector<int>{cmd.run.class_id} : cmd.classes;
    if (!cmd.checkpoints.empty()) options.checkpoints = cmd.checkpoints;
    options.workers = cmd.run.workers;
    options.batch_size = cmd.run.batch_size;
    options.inference_precision = precision.generation;
    options.min_max_normalize = cmd.normalize;
    const auto result = saliency::generate_map(item.image, params, *scorer, options);
    const std::string stem = params.digest() + "_" + safe_id(item.id);
    const StorageDtype dtype = storage_dtype(precision.storage);
    saliency::store_maps(dir / (stem + ".vrse"), result.maps, dtype);
    for (const auto& cp : result.checkpoints) {
      if (cp.masks_used == params.n_masks) continue;
      saliency::store_maps(dir / (stem + "_n" + std::to_string(cp.masks_used) + ".vrse"),
                           cp.maps, dtype);
    }
    for (const auto& map : result.maps) {
      write_netpbm((dir / (stem + "_c" + std::to_string(map.class_id) + ".pgm")).string(),
                   normalize_min_max(map.values));
    }
    std::cout << item.id << ": " << (dir / (stem + ".vrse")).string() << "\n";
  }
  return 0;
}

int run_altgame(const EvaluateCommand& cmd) {
  const auto items = cmd.images.load();
  check_single_item(cmd, items.size());
  const auto factory = cmd.scorer.factory();
  const PrecisionTuple precision = cmd.run.tuple();
  const auto options = game_options(cmd.game, cmd.run);
  std::vector<ResultRow> rows;
  fs::create_directories(cmd.run.out);
  Table curves(cmd.run.out / "curves.csv", {"image", "run", "variant", "step", "score"});
  for (const auto& item : items) {
    auto scorer = factory(item);
    const auto maps = obtain_maps(cmd, item, *scorer);
    for (std::size_t r = 0; r < maps.size(); ++r) {
      for (const auto& name : cmd.game.variants) {
        const auto variant = metrics::GameVariant::parse(name);
        const auto curve = metrics::alteration_game(maps[r].values, item.image, *scorer,
                                                    variant, cmd.run.class_id, options);
        ResultRow row = row_for(maps[r].params, item, static_cast<int>(r), name, precision,
                                maps[r].masks_used);
        row.value = curve.auc;
        rows.push_back(row);
        for (std::size_t k = 0; k < curve.scores.size(); ++k) {
          curves.line({item.id, std::to_string(r), name, std::to_string(k),
                       num(curve.scores[k])});
        }
      }
    }
  }
  write_results(cmd.run.out, rows);
  return 0;
}

int run_pointing(const EvaluateCommand& cmd) {
  const auto items = cmd.images.load();
  check_single_item(cmd, items.size());
  const auto factory = cmd.scorer.factory();
  const PrecisionTuple precision = cmd.run.tuple();
  std::vector<ResultRow> rows;
  std::size_t hits = 0;
  for (const auto& item : items) {
    auto scorer = factory(item);
    const auto maps = obtain_maps(cmd, item, *scorer);
    for (std::size_t r = 0; r < maps.size(); ++r) {
      const bool hit = metrics::pointing_game(maps[r].values, item.boxes, cmd.run.class_id);
      hits += hit;
      ResultRow row = row_for(maps[r].params, item, static_cast<int>(r), "pointing",
                              precision, maps[r].masks_used);
      row.value = hit ? 1.0 : 0.0;
      rows.push_back(row);
    }
  }
  std::cout << "pointing hits " << hits << "/" << rows.size() << "\n";
  write_results(cmd.run.out, rows);
  return 0;
}

int run_consistency(const EvaluateCommand& cmd) {
  const auto items = cmd.images.load();
  check_single_item(cmd, items.size());
  const auto factory = cmd.scorer.factory();
  const PrecisionTuple precision = cmd.run.tuple();
  std::vector<ResultRow> rows;
  fs::create_directories(cmd.run.out);
  Table pairs(cmd.run.out / "pairs.csv", {"image", "a", "b", "ssim"});
  for (const auto& item : items) {
    auto scorer = factory(item);
    const auto maps = obtain_maps(cmd, item, *scorer);
    std::vector<Image> values;
    for (const auto& m : maps) values.push_back(m.values);
    const auto scores = metrics::consistency(values);
    std::size_t k = 0;
    for (std::size_t a = 0; a < values.size(); ++a) {
      for (std::size_t b = a + 1; b < values.size(); ++b) {
        pairs.line({item.id, std::to_string(a), std::to_string(b), num(scores[k++])});
      }
    }
    ResultRow row = row_for(maps.front().params, item, experiments::kAggregateRun,
                            "consistency", precision, maps.front().masks_used);
    row.value = std::accumulate(scores.begin(), scores.end(), 0.0) /
                static_cast<double>(scores.size());
    rows.push_back(row);
  }
  write_results(cmd.run.out, rows);
  return 0;
}

int run_sweep(const SweepCommand& cmd) {
  const auto items = cmd.images.load();
  experiments::ExperimentSpec spec;
  spec.algorithm = saliency::parse_algorithm(cmd.algorithm);
  spec.p1_values = cmd.p1;
  spec.polygons = cmd.polygons;
  spec.meshcounts = cmd.meshcounts;
  spec.sigmas = cmd.sigmas;
  spec.n_masks = cmd.n_masks;
  spec.selector = gridgen::GeneratorKind::parse(cmd.selector);
  spec.master_seed = cmd.seed;
  spec.runs = cmd.runs;
  spec.metrics = cmd.metrics;
  if (!cmd.checkpoints.empty()) spec.checkpoints = cmd.checkpoints;
  spec.precision = cmd.run.tuple();
  spec.rise_reference = cmd.rise_reference;
  spec.class_id = cmd.run.class_id;
  spec.game = game_options(cmd.game, cmd.run);
  spec.workers = cmd.run.workers;
  spec.batch_size = cmd.run.batch_size;
  if (cmd.archive) spec.archive_dir = cmd.run.out / "archives";
  spec.validate();

  fs::create_directories(cmd.run.out);
  experiments::Journal journal(cmd.run.out / "journal.jsonl");
  const std::size_t resumed = journal.size();
  auto rows = experiments::run_sweep(spec, items, cmd.scorer.factory(), journal);
  const std::size_t failed =
      std::count_if(rows.begin(), rows.end(), [](const ResultRow& r) { return r.failed(); });
  std::cout << "sweep: " << rows.size() << " rows (" << resumed << " resumed, " << failed
            << " failed)\n";
  if (spec.rise_reference) {
    const auto report = experiments::delta_report(rows, items);
    rows.insert(rows.end(), report.begin(), report.end());
  }
  write_results(cmd.run.out, rows);
  return failed == 0 ? 0 : 2;
}

int run_sigma_match(const SigmaMatchCommand& cmd) {
  const auto result = experiments::sigma_matching(cmd.spec);
  fs::create_directories(cmd.out);
  {
    Table table(cmd.out / "sigma_match.csv", {"side", "p1", "sigma", "mean_ssim", "mean_rank",
                                              "top1_frequency", "rank", "tie"});
    for (const auto& r : result.rows) {
      table.line({std::to_string(r.side), num(r.p1), num(r.sigma), num(r.mean_ssim),
                  num(r.mean_rank), num(r.top1_frequency), std::to_string(r.rank),
                  r.tie ? "1" : "0"});
    }
  }
  Table summary(cmd.out / "sigma_match_summary.csv", {"side", "p1", "winner", "consistent"});
  for (const auto& s : result.summaries) {
    std::cout << "side " << s.side << " (" << s.side * s.side << " cells): winners";
    for (std::size_t i = 0; i < s.winners.size(); ++i) {
      summary.line({std::to_string(s.side), num(cmd.spec.p1_values[i]), num(s.winners[i]),
                    s.consistent ? "1" : "0"});
      std::cout << " " << s.winners[i];
    }
    std::cout << (s.consistent ? " (consistent)" : " (inconsistent)") << "\n";
  }
  return 0;
}

int run_fp16_ab(const Fp16AbCommand& cmd) {
  const auto items = cmd.images.load();
  experiments::Fp16AbSpec spec;
  spec.params = cmd.params.params();
  spec.runs = cmd.runs;
  spec.variants.clear();
  for (const auto& v : cmd.game.variants) spec.variants.push_back(metrics::GameVariant::parse(v));
  spec.class_id = cmd.run.class_id;
  spec.game = game_options(cmd.game, cmd.run);
  spec.workers = cmd.run.workers;
  spec.batch_size = cmd.run.batch_size;
  const auto result = experiments::fp16_ab(spec, items, cmd.scorer.factory());
  write_results(cmd.run.out, result.rows);
  Table table(cmd.run.out / "fp16_stats.csv",
              {"precision", "variant", "samples", "skipped", "mean", "stddev", "min", "max",
               "share_within_5pct"});
  for (const auto& s : result.stats) {
    table.line({"\"" + s.precision.to_string() + "\"", s.variant, std::to_string(s.samples),
                std::to_string(s.skipped), num(s.mean), num(s.stddev), num(s.min),
                num(s.max), num(s.share_within_5pct)});
    std::printf("%-32s %-8s mean %+.3e std %.3e within 5%% %.3f\n",
                s.precision.to_string().c_str(), s.variant.c_str(), s.mean, s.stddev,
                s.share_within_5pct);
  }
  return 0;
}

int run_gridgen_study(const GridgenStudyCommand& cmd) {
  fs::create_directories(cmd.out);
  Table table(cmd.out / "gridgen_study.csv",
              {"generator", "n_cells", "p1", "draws", "uninformative", "uninformative_rate",
               "analytic_p_u", "fill_mean", "fill_var", "visible_target", "error"});
  for (const auto& name : cmd.generators) {
    const auto kind = gridgen::GeneratorKind::parse(name);
    for (std::size_t n : cmd.cells) {
      for (double p1 : cmd.p1) {
        std::size_t uninformative = 0;
        double sum = 0.0;
        double sum_sq = 0.0;
        std::size_t done = 0;
        std::string error;
        try {
          for (; done < cmd.draws; ++done) {
            const auto s = gridgen::make_selector(kind, n, p1, cmd.seed, done);
            uninformative += s.is_uninformative();
            const double k = static_cast<double>(s.fill_count());
            sum += k;
            sum_sq += k * k;
          }
        } catch (const std::exception& e) {
          error = e.what();
        }
        const double draws = static_cast<double>(std::max<std::size_t>(done, 1));
        const double mean = sum / draws;
        table.line({kind.to_string(), std::to_string(n), num(p1), std::to_string(done),
                    std::to_string(uninformative), num(uninformative / draws),
                    num(gridgen::uninformative_probability(n, p1)), num(mean),
                    num(sum_sq / draws - mean * mean),
                    std::to_string(gridgen::visible_target(n, p1)),
                    error.empty() ? "" : "\"" + error + "\""});
      }
    }
  }
  std::cout << "wrote " << (cmd.out / "gridgen_study.csv").string() << "\n";
  if (!cmd.convergence) return 0;

  const auto item = cmd.images.load().front();
  RegionOracle oracle(item.oracle, item.image.height(), item.image.width());
  const auto points =
      experiments::guarantee_convergence_study(cmd.convergence_spec, item, oracle);
  Table conv(cmd.out / "convergence.csv",
             {"n_masks", "guaranteed_to_ref", "baseline_to_ref", "guaranteed_consistency",
              "baseline_consistency", "consistency_difference"});
  for (const auto& p : points) {
    conv.line({std::to_string(p.n_masks), num(p.guaranteed_to_ref), num(p.baseline_to_ref),
               num(p.guaranteed_consistency), num(p.baseline_consistency),
               num(p.consistency_difference())});
    std::printf("N=%zu guaranteed %.4f baseline %.4f consistency diff %+.4f\n", p.n_masks,
                p.guaranteed_to_ref, p.baseline_to_ref, p.consistency_difference());
  }
  return 0;
}

int run_serve(const ServeCommand& cmd) {
  const auto item = cmd.images.load().front();
  RegionOracleSpec spec = item.oracle;
  spec.num_classes = cmd.classes;
  RegionOracle oracle(spec, item.image.height(), item.image.width());
  if (cmd.stdio) {
    wire::FdStream stream(0, 1, 0, false);
    wire::serve_stream(stream, oracle);
    return 0;
  }
  wire::TcpServer server(oracle, cmd.port);
  std::cout << "listening on 127.0.0.1:" << server.port() << std::endl;
  server.run(cmd.max_connections);
  return 0;
}

}  // namespace vrise::cli
