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

#include "vrise/gridgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vrise::gridgen {
namespace {

constexpr double kCountGuard = 1e-9;

void validate_params(std::size_t n_cells, double p1, const char* who) {
  if (n_cells == 0) {
    throw std::invalid_argument(std::string(who) + ": n_cells must be >= 1");
  }
  if (!(p1 >= 0.0 && p1 <= 1.0)) {
    throw std::invalid_argument(std::string(who) + ": p1 must be in [0, 1]");
  }
}

OcclusionSelector constant_selector(std::size_t n_cells, double p1,
                                    std::uint8_t value) {
  OcclusionSelector out;
  out.bits.assign(n_cells, value);
  out.target_p1 = p1;
  out.explicitly_uninformative = true;
  return out;
}

OcclusionSelector run_plain(Generator g, std::size_t n_cells, double p1,
                            RandomStream& rng) {
  switch (g) {
    case Generator::kThreshold:
      return threshold_grid(n_cells, p1, rng);
    case Generator::kCoordinate:
      return coordinate_grid(n_cells, p1, rng);
    case Generator::kPermutation:
      return permutation_grid(n_cells, p1, rng);
    case Generator::kHybrid:
      break;
  }
  throw std::invalid_argument("hybrid generators cannot be nested");
}

Generator parse_plain(const std::string& name) {
  if (name == "threshold") return Generator::kThreshold;
  if (name == "coordinate") return Generator::kCoordinate;
  if (name == "permutation") return Generator::kPermutation;
  throw std::invalid_argument("unknown grid generator '" + name + "'");
}

}  // namespace

std::size_t OcclusionSelector::fill_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

double OcclusionSelector::fill_rate() const {
  return bits.empty() ? 0.0
                      : static_cast<double>(fill_count()) /
                            static_cast<double>(bits.size());
}

bool OcclusionSelector::is_uninformative() const {
  const std::size_t k = fill_count();
  return k == 0 || k == bits.size();
}

GeneratorKind GeneratorKind::hybrid(Generator base, Generator fixer,
                                    double p_u_threshold) {
  GeneratorKind out{Generator::kHybrid, base, fixer, p_u_threshold};
  out.validate();
  return out;
}

void GeneratorKind::validate() const {
  if (kind != Generator::kHybrid) return;
  if (base == Generator::kHybrid || fixer == Generator::kHybrid) {
    throw std::invalid_argument("hybrid base and fixer must be non-hybrid");
  }
  if (!(p_u_threshold >= 0.0 && p_u_threshold <= 1.0)) {
    throw std::invalid_argument("hybrid P_U threshold must be in [0, 1]");
  }
}

std::string to_string(Generator g) {
  switch (g) {
    case Generator::kThreshold:
      return "threshold";
    case Generator::kCoordinate:
      return "coordinate";
    case Generator::kPermutation:
      return "permutation";
    case Generator::kHybrid:
      return "hybrid";
  }
  return "?";
}

std::string GeneratorKind::to_string() const {
  if (kind != Generator::kHybrid) return gridgen::to_string(kind);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", p_u_threshold);
  return "hybrid:" + gridgen::to_string(base) + "+" +
         gridgen::to_string(fixer) + "@" + buf;
}

GeneratorKind GeneratorKind::parse(const std::string& text) {
  if (text.rfind("hybrid", 0) != 0) return {parse_plain(text)};
  // hybrid[:base+fixer[@threshold]]
  GeneratorKind out{Generator::kHybrid};
  if (text == "hybrid") return out;
  if (text.size() < 8 || text[6] != ':') {
    throw std::invalid_argument("malformed hybrid generator '" + text + "'");
  }
  std::string rest = text.substr(7);
  const auto at = rest.find('@');
  if (at != std::string::npos) {
    std::size_t used = 0;
    const std::string thr = rest.substr(at + 1);
    out.p_u_threshold = std::stod(thr, &used);
    if (used != thr.size()) {
      throw std::invalid_argument("malformed hybrid threshold in '" + text +
                                  "'");
    }
    rest = rest.substr(0, at);
  }
  const auto plus = rest.find('+');
  if (plus == std::string::npos) {
    throw std::invalid_argument("hybrid generator needs base+fixer: '" + text +
                                "'");
  }
  out.base = parse_plain(rest.substr(0, plus));
  out.fixer = parse_plain(rest.substr(plus + 1));
  out.validate();
  return out;
}

std::size_t visible_target(std::size_t n_cells, double p1) {
  if (p1 <= 0.0) return 0;
  if (p1 >= 1.0) return n_cells;
  const double k = std::ceil(static_cast<double>(n_cells) * p1 - kCountGuard);
  return std::min(n_cells, static_cast<std::size_t>(std::max(k, 0.0)));
}

std::size_t occluded_target(std::size_t n_cells, double p1) {
  if (p1 <= 0.0) return n_cells;
  if (p1 >= 1.0) return 0;
  const double k =
      std::floor(static_cast<double>(n_cells) * (1.0 - p1) + kCountGuard);
  return std::min(n_cells, static_cast<std::size_t>(std::max(k, 0.0)));
}

OcclusionSelector threshold_grid(std::size_t n_cells, double p1,
                                 RandomStream& rng) {
  validate_params(n_cells, p1, "threshold_grid");
  OcclusionSelector out;
  out.target_p1 = p1;
  out.bits.resize(n_cells);
  for (auto& b : out.bits) b = rng.uniform() < p1 ? 1 : 0;
  return out;
}

OcclusionSelector coordinate_grid(std::size_t n_cells, double p1,
                                  RandomStream& rng) {
  validate_params(n_cells, p1, "coordinate_grid");
  if (p1 == 0.0) return constant_selector(n_cells, p1, 0);
  if (p1 == 1.0) return constant_selector(n_cells, p1, 1);

  OcclusionSelector out;
  out.target_p1 = p1;
  if (p1 <= 0.5) {
    out.bits.assign(n_cells, 0);
    const std::size_t draws = visible_target(n_cells, p1);
    for (std::size_t i = 0; i < draws; ++i) out.bits[rng.below(n_cells)] = 1;
  } else {
    out.bits.assign(n_cells, 1);
    const std::size_t draws =
        std::max<std::size_t>(1, occluded_target(n_cells, p1));
    for (std::size_t i = 0; i < draws; ++i) out.bits[rng.below(n_cells)] = 0;
  }
  return out;
}

OcclusionSelector permutation_grid(std::size_t n_cells, double p1,
                                   RandomStream& rng) {
  validate_params(n_cells, p1, "permutation_grid");
  if (p1 == 0.0) return constant_selector(n_cells, p1, 0);
  if (p1 == 1.0) return constant_selector(n_cells, p1, 1);

  OcclusionSelector out;
  out.target_p1 = p1;
  out.bits.assign(n_cells, 0);
  std::vector<std::size_t> cells(n_cells);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  const std::size_t k = visible_target(n_cells, p1);
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n_cells - i);
    std::swap(cells[i], cells[j]);
    out.bits[cells[i]] = 1;
  }
  return out;
}

double uninformative_probability(std::size_t n_cells, double p1) {
  validate_params(n_cells, p1, "uninformative_probability");
  const double n = static_cast<double>(n_cells);
  return std::pow(p1, n) + std::pow(1.0 - p1, n);
}

bool hybrid_fixing_enabled(double p_u_threshold, std::size_t n_cells,
                           double p1) {
  return uninformative_probability(n_cells, p1) > p_u_threshold;
}

std::size_t hybrid_round_cap(std::size_t n_cells, double p1) {
  const double informative = 1.0 - uninformative_probability(n_cells, p1);
  if (!(informative > 0.0)) {
    throw std::invalid_argument(
        "hybrid_round_cap: informative selectors are impossible (P_U = 1)");
  }
  const double rounds = 10.0 * std::ceil(1.0 / informative);
  if (rounds >= static_cast<double>(std::numeric_limits<std::size_t>::max())) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(rounds);
}

OcclusionSelector make_selector(const GeneratorKind& kind, std::size_t n_cells,
                                double p1, std::uint64_t master_seed,
                                std::uint64_t index) {
  kind.validate();
  RandomStream rng(master_seed, StreamDomain::kSelector, index);
  if (kind.kind != Generator::kHybrid) {
    return run_plain(kind.kind, n_cells, p1, rng);
  }

  const bool fixing = hybrid_fixing_enabled(kind.p_u_threshold, n_cells, p1);
  const bool extreme = p1 == 0.0 || p1 == 1.0;
  if (fixing && !extreme) {
    if (n_cells < 2) {
      throw std::invalid_argument(
          "hybrid_grid: a single cell can never be informative");
    }
    if (kind.fixer == Generator::kPermutation) {
      const std::size_t k = visible_target(n_cells, p1);
      if (k == 0 || k == n_cells) {
        throw std::invalid_argument(
            "hybrid_grid: permutation fixer yields only uninformative "
            "selectors for these parameters");
      }
    }
  }

  OcclusionSelector base = run_plain(kind.base, n_cells, p1, rng);
  if (!fixing || !base.is_uninformative()) return base;
  if (extreme) {
    base.explicitly_uninformative = true;
    return base;
  }

  const std::size_t cap = hybrid_round_cap(n_cells, p1);
  for (std::size_t round = 1; round <= cap; ++round) {
    RandomStream fix_rng(master_seed, StreamDomain::kFixer, index,
                         static_cast<std::uint32_t>(round & 0xFFFFFFu));
    OcclusionSelector candidate = run_plain(kind.fixer, n_cells, p1, fix_rng);
    if (!candidate.is_uninformative()) return candidate;
  }
  throw std::runtime_error("hybrid_grid: replacement rounds exhausted (" +
                           std::to_string(cap) + ")");
}

std::vector<OcclusionSelector> generate_batch(const GeneratorKind& kind,
                                              std::size_t n_cells, double p1,
                                              std::uint64_t master_seed,
                                              std::size_t batch) {
  std::vector<OcclusionSelector> out;
  out.reserve(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    out.push_back(make_selector(kind, n_cells, p1, master_seed, i));
  }
  return out;
}

std::vector<OcclusionSelector> hybrid_grid(Generator base, Generator fixer,
                                           double p_u_threshold,
                                           std::size_t n_cells, double p1,
                                           std::uint64_t master_seed,
                                           std::size_t batch) {
  if (batch == 0) throw std::invalid_argument("hybrid_grid: batch must be >= 1");
  return generate_batch(GeneratorKind::hybrid(base, fixer, p_u_threshold),
                        n_cells, p1, master_seed, batch);
}

}  // namespace vrise::gridgen
