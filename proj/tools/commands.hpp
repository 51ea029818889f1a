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
#include <string>
#include <vector>

#include "vrise/experiments.hpp"

namespace vrise::cli {

struct ImageFlags {
  std::string image;
  std::string boxes;
  std::size_t synthetic = 1;
  std::uint64_t corpus_seed = 0;
  int size = 64;
  int channels = 3;
  std::size_t min_instances = 1;
  std::size_t max_instances = 1;

  std::vector<experiments::CorpusItem> load() const;
};

struct ScorerFlags {
  std::string scorer = "oracle";  // oracle | remote:<endpoint>
  int timeout_ms = 60000;
  int classes = 2;

  experiments::ScorerFactory factory() const;
};

struct ParamFlags {
  std::string algorithm = "vrise";
  std::size_t n_masks = 1000;
  std::size_t polygons = 49;
  double p1 = 0.5;
  std::size_t meshcount = 100;
  double sigma = 0.0;
  std::string selector = "threshold";
  std::uint64_t seed = 0;

  saliency::ParamSet params() const;
};

struct RunFlags {
  std::string precision = "gen=fp32,store=fp32,game=fp32";
  std::size_t workers = 1;
  std::size_t batch_size = 32;
  int class_id = 0;
  std::filesystem::path out = "vrise_out";

  experiments::PrecisionTuple tuple() const;
};

struct GameFlags {
  std::vector<std::string> variants{"insert", "remove"};
  std::size_t step = 224;
  double substrate_sigma = 9.0;
};

struct MapFlags {
  std::vector<std::string> maps;  // archives; generated when empty
  std::size_t runs = 1;
};

struct GenerateCommand {
  ImageFlags images;
  ScorerFlags scorer;
  ParamFlags params;
  RunFlags run;
  std::vector<int> classes;
  std::vector<std::size_t> checkpoints;
  bool normalize = false;
};

struct EvaluateCommand {
  ImageFlags images;
  ScorerFlags scorer;
  ParamFlags params;
  RunFlags run;
  MapFlags maps;
  GameFlags game;
};

struct SweepCommand {
  ImageFlags images;
  ScorerFlags scorer;
  RunFlags run;
  std::string algorithm = "vrise";
  std::vector<double> p1{0.5};
  std::vector<std::size_t> polygons{49};
  std::vector<std::size_t> meshcounts{100};
  std::vector<double> sigmas{0.0};
  std::size_t n_masks = 1000;
  std::string selector = "threshold";
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  std::vector<std::string> metrics{"pointing"};
  std::vector<std::size_t> checkpoints;
  bool rise_reference = false;
  bool archive = false;
  GameFlags game;
};

struct SigmaMatchCommand {
  experiments::SigmaMatchSpec spec;
  std::filesystem::path out = "vrise_out";
};

struct Fp16AbCommand {
  ImageFlags images;
  ScorerFlags scorer;
  ParamFlags params;
  RunFlags run;
  std::size_t runs = 1;
  GameFlags game;
};

struct GridgenStudyCommand {
  std::vector<std::string> generators{"threshold", "coordinate", "permutation",
                                      "hybrid:threshold+coordinate@0"};
  std::vector<std::size_t> cells{4, 9, 16, 25, 49};
  std::vector<double> p1{0.1, 0.25, 0.5, 0.75, 0.9};
  std::size_t draws = 10000;
  std::uint64_t seed = 0;
  bool convergence = false;
  experiments::ConvergenceSpec convergence_spec;
  ImageFlags images;
  std::filesystem::path out = "vrise_out";
};

struct ServeCommand {
  ImageFlags images;
  int port = 0;
  bool stdio = false;
  std::size_t max_connections = 0;
  int classes = 2;
};

int run_generate(const GenerateCommand& cmd);
int run_altgame(const EvaluateCommand& cmd);
int run_pointing(const EvaluateCommand& cmd);
int run_consistency(const EvaluateCommand& cmd);
int run_sweep(const SweepCommand& cmd);
int run_sigma_match(const SigmaMatchCommand& cmd);
int run_fp16_ab(const Fp16AbCommand& cmd);
int run_gridgen_study(const GridgenStudyCommand& cmd);
int run_serve(const ServeCommand& cmd);

}  // namespace vrise::cli
