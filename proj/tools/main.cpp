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

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "commands.hpp"

namespace {

using namespace vrise::cli;

void add_images(CLI::App* app, ImageFlags& f) {
  app->add_option("--image", f.image, "Image file (PGM/PPM)");
  app->add_option("--boxes", f.boxes, "Bounding boxes JSON for --image");
  app->add_option("--synthetic", f.synthetic, "Number of synthetic images");
  app->add_option("--corpus-seed", f.corpus_seed, "Seed of the synthetic corpus");
  app->add_option("--size", f.size, "Synthetic image side");
  app->add_option("--channels", f.channels, "Synthetic image channels");
  app->add_option("--min-instances", f.min_instances, "Fewest target boxes per image");
  app->add_option("--max-instances", f.max_instances, "Most target boxes per image");
}

void add_scorer(CLI::App* app, ScorerFlags& f) {
  app->add_option("--scorer", f.scorer, "oracle or remote:<endpoint>");
  app->add_option("--timeout-ms", f.timeout_ms, "Remote scorer timeout");
  app->add_option("--classes", f.classes, "Class count of the oracle");
}

void add_params(CLI::App* app, ParamFlags& f) {
  app->add_option("--algorithm", f.algorithm, "rise or vrise");
  app->add_option("--n-masks", f.n_masks, "Masks per map");
  app->add_option("--polygons", f.polygons, "Mesh cells, or s*s grid cells");
  app->add_option("--p1", f.p1, "Share of visible cells");
  app->add_option("--meshcount", f.meshcount, "Meshes per map");
  app->add_option("--sigma", f.sigma, "Mask blur sigma");
  app->add_option("--selector", f.selector, "threshold, coordinate, permutation or hybrid:B+F@T");
  app->add_option("--seed", f.seed, "Master seed");
}

void add_run(CLI::App* app, RunFlags& f) {
  app->add_option("--precision", f.precision, "gen=..,store=..,game=..");
  app->add_option("--workers", f.workers, "Worker threads");
  app->add_option("--batch", f.batch_size, "Scorer batch size");
  app->add_option("--class", f.class_id, "Explained class");
  app->add_option("--out", f.out, "Output directory");
}

void add_game(CLI::App* app, GameFlags& f) {
  app->add_option("--variant", f.variants, "insert, sharpen, remove, blur")->delimiter(',');
  app->add_option("--step", f.step, "Pixels altered per step");
  app->add_option("--substrate-sigma", f.substrate_sigma, "Blur of the blurred substrate");
}

void add_evaluate(CLI::App* app, EvaluateCommand& c, bool game) {
  add_images(app, c.images);
  add_scorer(app, c.scorer);
  add_params(app, c.params);
  add_run(app, c.run);
  app->add_option("--map", c.maps.maps, "Map archives; generated when absent");
  app->add_option("--runs", c.maps.runs, "Maps generated per image");
  if (game) add_game(app, c.game);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi and grid occlusion saliency experiments"};
  app.require_subcommand(1);

  GenerateCommand generate;
  auto* gen = app.add_subcommand("generate", "Generate saliency maps");
  add_images(gen, generate.images);
  add_scorer(gen, generate.scorer);
  add_params(gen, generate.params);
  add_run(gen, generate.run);
  gen->add_option("--classes-to-explain", generate.classes, "Classes to explain")
      ->delimiter(',');
  gen->add_option("--checkpoints", generate.checkpoints, "Mask counts to snapshot")
      ->delimiter(',');
  gen->add_flag("--normalize", generate.normalize, "Min-max normalize maps");

  EvaluateCommand altgame;
  auto* alt = app.add_subcommand("altgame", "Alteration game AuC");
  add_evaluate(alt, altgame, true);

  EvaluateCommand pointing;
  auto* point = app.add_subcommand("pointing", "Pointing game");
  add_evaluate(point, pointing, false);

  EvaluateCommand consistency;
  consistency.maps.runs = 2;
  auto* cons = app.add_subcommand("consistency", "Pairwise SSIM over maps");
  add_evaluate(cons, consistency, false);

  SweepCommand sweep;
  auto* sw = app.add_subcommand("sweep", "Parameter grid sweep");
  add_images(sw, sweep.images);
  add_scorer(sw, sweep.scorer);
  add_run(sw, sweep.run);
  add_game(sw, sweep.game);
  sw->add_option("--algorithm", sweep.algorithm, "rise or vrise");
  sw->add_option("--p1", sweep.p1, "p1 values")->delimiter(',');
  sw->add_option("--polygons", sweep.polygons, "Polygon counts")->delimiter(',');
  sw->add_option("--meshcount", sweep.meshcounts, "Mesh counts")->delimiter(',');
  sw->add_option("--sigma", sweep.sigmas, "Blur sigmas")->delimiter(',');
  sw->add_option("--n-masks", sweep.n_masks, "Masks per map");
  sw->add_option("--selector", sweep.selector, "Selector generator");
  sw->add_option("--seed", sweep.seed, "Master seed");
  sw->add_option("--runs", sweep.runs, "Runs per parameter set");
  sw->add_option("--metrics", sweep.metrics, "pointing, insert, sharpen, remove, blur, consistency")
      ->delimiter(',');
  sw->add_option("--checkpoints", sweep.checkpoints, "Mask counts to evaluate")->delimiter(',');
  sw->add_flag("--rise-reference", sweep.rise_reference, "Add RISE rows and the delta report");
  sw->add_flag("--archive", sweep.archive, "Store final maps under out/archives");

  SigmaMatchCommand sigma;
  auto* sm = app.add_subcommand("sigma-match", "Match blur sigma to grid upsampling");
  sm->add_option("--sides", sigma.spec.sides, "Grid sides")->delimiter(',');
  sm->add_option("--p1", sigma.spec.p1_values, "p1 values")->delimiter(',');
  sm->add_option("--sigmas", sigma.spec.sigmas, "Candidate sigmas")->delimiter(',');
  sm->add_option("--samples", sigma.spec.samples, "Samples per configuration");
  sm->add_option("--size", sigma.spec.size, "Image side");
  sm->add_option("--seed", sigma.spec.seed, "Seed");
  sm->add_option("--workers", sigma.spec.workers, "Worker threads");
  sm->add_option("--out", sigma.out, "Output directory");

  Fp16AbCommand fp16;
  auto* ab = app.add_subcommand("fp16-ab", "Precision A/B over all stage combinations");
  add_images(ab, fp16.images);
  add_scorer(ab, fp16.scorer);
  add_params(ab, fp16.params);
  add_run(ab, fp16.run);
  add_game(ab, fp16.game);
  ab->add_option("--runs", fp16.runs, "Runs per image");

  GridgenStudyCommand study;
  auto* gs = app.add_subcommand("gridgen-study", "Selector generator statistics");
  gs->add_option("--generators", study.generators, "Generators")->delimiter(',');
  gs->add_option("--cells", study.cells, "Cell counts")->delimiter(',');
  gs->add_option("--p1", study.p1, "p1 values")->delimiter(',');
  gs->add_option("--draws", study.draws, "Draws per configuration");
  gs->add_option("--seed", study.seed, "Seed");
  gs->add_option("--out", study.out, "Output directory");
  gs->add_flag("--convergence", study.convergence, "Also run the convergence study");
  gs->add_option("--conv-side", study.convergence_spec.side, "Convergence grid side");
  gs->add_option("--conv-p1", study.convergence_spec.p1, "Convergence p1");
  gs->add_option("--conv-schedule", study.convergence_spec.n_schedule, "Mask counts")
      ->delimiter(',');
  gs->add_option("--conv-maps", study.convergence_spec.maps, "Maps per group");
  gs->add_option("--conv-ref-masks", study.convergence_spec.n_ref, "Masks per reference map");
  gs->add_option("--conv-seed", study.convergence_spec.seed, "Convergence seed");
  gs->add_option("--conv-workers", study.convergence_spec.workers, "Worker threads");
  add_images(gs, study.images);

  ServeCommand serve;
  auto* sv = app.add_subcommand("serve", "Serve the region oracle over the wire protocol");
  add_images(sv, serve.images);
  sv->add_option("--port", serve.port, "TCP port (0 picks one)");
  sv->add_flag("--stdio", serve.stdio, "Serve on stdin/stdout");
  sv->add_option("--max-connections", serve.max_connections, "Stop after this many");
  sv->add_option("--classes", serve.classes, "Class count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_generate(generate);
    if (*alt) return run_altgame(altgame);
    if (*point) return run_pointing(pointing);
    if (*cons) return run_consistency(consistency);
    if (*sw) return run_sweep(sweep);
    if (*sm) return run_sigma_match(sigma);
    if (*ab) return run_fp16_ab(fp16);
    if (*gs) return run_gridgen_study(study);
    if (*sv) return run_serve(serve);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
