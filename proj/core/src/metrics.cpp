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

#include "vrise/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vrise::metrics {

std::string GameVariant::name() const {
  if (entropy == Entropy::kConstructive) {
    return substrate == Substrate::kZeros ? "insert" : "sharpen";
  }
  return substrate == Substrate::kZeros ? "remove" : "blur";
}

GameVariant GameVariant::parse(const std::string& name) {
  if (name == "insert") return insert();
  if (name == "sharpen") return sharpen();
  if (name == "remove") return remove();
  if (name == "blur") return blur();
  throw std::invalid_argument("unknown alteration game variant '" + name + "'");
}

std::vector<std::size_t> saliency_order(const Image& map) {
  auto values = map.data();
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  return order;
}

Image game_substrate(const Image& image, Substrate substrate,
                     const GameOptions& options) {
  if (substrate == Substrate::kZeros) {
    return Image(image.height(), image.width(), image.channels(), 0.0f);
  }
  return masking::gaussian_blur(image, options.substrate_sigma, options.border);
}

Image game_state(const Image& from, const Image& to,
                 std::span<const std::size_t> order, std::size_t altered) {
  Image state = from;
  auto dst = state.data();
  auto src = to.data();
  const int c = from.channels();
  altered = std::min(altered, order.size());
  for (std::size_t i = 0; i < altered; ++i) {
    const std::size_t p = order[i];
    for (int k = 0; k < c; ++k) dst[p * c + k] = src[p * c + k];
  }
  return state;
}

double area_under_curve(std::span<const double> scores) {
  if (scores.empty()) return 0.0;
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

GameCurve alteration_game(const Image& map, const Image& image, Scorer& scorer,
                          GameVariant variant, int class_id,
                          const GameOptions& options) {
  if (map.channels() != 1 || map.height() != image.height() ||
      map.width() != image.width()) {
    throw std::invalid_argument("alteration_game: map " + map.shape_string() +
                                " does not match image " + image.shape_string());
  }
  if (options.step == 0) {
    throw std::invalid_argument("alteration_game: step must be >= 1");
  }
  if (class_id < 0 || class_id >= scorer.num_classes()) {
    throw std::invalid_argument("alteration_game: class id out of range");
  }

  const Image substrate = game_substrate(image, variant.substrate, options);
  const bool destructive = variant.entropy == Entropy::kDestructive;
  const Image& from = destructive ? image : substrate;
  const Image& to = destructive ? substrate : image;
  const std::vector<std::size_t> order = saliency_order(map);

  const std::size_t pixels = order.size();
  const std::size_t steps = (pixels + options.step - 1) / options.step;
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);

  GameCurve curve;
  curve.scores.reserve(steps + 1);
  Image state = from;
  std::vector<Image> pending;
  auto flush = [&] {
    if (pending.empty()) return;
    const auto scores = scorer.score_batch(pending, options.precision);
    if (scores.size() != pending.size()) {
      throw ScorerError("alteration_game: scorer returned a short batch");
    }
    for (const auto& v : scores) curve.scores.push_back(v.at(class_id));
    pending.clear();
  };

  auto dst = state.data();
  auto src = to.data();
  const int c = image.channels();
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k > 0) {
      const std::size_t begin = (k - 1) * options.step;
      const std::size_t end = std::min(pixels, k * options.step);
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t p = order[i];
        for (int ch = 0; ch < c; ++ch) dst[p * c + ch] = src[p * c + ch];
      }
    }
    pending.push_back(state);
    if (pending.size() == batch) flush();
  }
  flush();
  curve.auc = area_under_curve(curve.scores);
  return curve;
}

PixelIndex argmax_pixel(const Image& map) {
  if (map.empty()) throw std::invalid_argument("argmax_pixel: empty map");
  auto values = map.data();
  const int c = map.channels();
  std::size_t best = 0;
  for (std::size_t p = 1; p < map.pixel_count(); ++p) {
    if (values[p * c] > values[best * c]) best = p;
  }
  return {static_cast<int>(best / map.width()),
          static_cast<int>(best % map.width())};
}

bool pointing_game(const Image& map, std::span<const BoundingBox> boxes,
                   int class_id) {
  const bool any = std::any_of(boxes.begin(), boxes.end(), [&](const auto& b) {
    return b.class_id == class_id;
  });
  if (!any) {
    throw std::invalid_argument("pointing_game: no boxes for class " +
                                std::to_string(class_id));
  }
  const PixelIndex top = argmax_pixel(map);
  return std::any_of(boxes.begin(), boxes.end(), [&](const BoundingBox& b) {
    return b.class_id == class_id && b.contains(top.x, top.y);
  });
}

namespace {

// Valid-mode separable filter of one channel.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::vector<double>& taps) {
  const int win = static_cast<int>(taps.size());
  const int oh = h - win + 1;
  const int ow = w - win + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < win; ++k) {
        acc += taps[k] * src[static_cast<std::size_t>(y) * w + x + k];
      }
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y) {
    for (int k = 0; k < win; ++k) {
      const double t = taps[k];
      const double* in = rows.data() + static_cast<std::size_t>(y + k) * ow;
      double* o = out.data() + static_cast<std::size_t>(y) * ow;
      for (int x = 0; x < ow; ++x) o[x] += t * in[x];
    }
  }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  if (!a.same_shape(b) || a.empty()) {
    throw std::invalid_argument("ssim: shapes differ (" + a.shape_string() +
                                " vs " + b.shape_string() + ")");
  }
  const float lo = std::min(a.min_value(), b.min_value());
  const float hi = std::max(a.max_value(), b.max_value());
  const double range = static_cast<double>(hi) - static_cast<double>(lo);
  if (range == 0.0) return 1.0;

  int win = std::min({11, a.height(), a.width()});
  if (win % 2 == 0) --win;
  std::vector<double> taps(win);
  const double half = (win - 1) / 2.0;
  for (int i = 0; i < win; ++i) {
    const double x = (i - half) / 1.5;
    taps[i] = std::exp(-0.5 * x * x);
  }
  const double norm = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= norm;

  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  const int h = a.height();
  const int w = a.width();
  const int channels = a.channels();
  const std::size_t n = a.pixel_count();

  double total = 0.0;
  std::size_t windows = 0;
  for (int ch = 0; ch < channels; ++ch) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = a.data()[p * channels + ch];
      y[p] = b.data()[p * channels + ch];
      xx[p] = x[p] * x[p];
      yy[p] = y[p] * y[p];
      xy[p] = x[p] * y[p];
    }
    const auto mx = filter_valid(x, h, w, taps);
    const auto my = filter_valid(y, h, w, taps);
    const auto mxx = filter_valid(xx, h, w, taps);
    const auto myy = filter_valid(yy, h, w, taps);
    const auto mxy = filter_valid(xy, h, w, taps);
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = mxx[i] - mx[i] * mx[i];
      const double vy = myy[i] - my[i] * my[i];
      const double cov = mxy[i] - mx[i] * my[i];
      const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
      const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
      total += num / den;
    }
    windows += mx.size();
  }
  return total / static_cast<double>(windows);
}

std::vector<double> consistency(std::span<const Image> maps) {
  if (maps.size() < 2) {
    throw std::invalid_argument("consistency: need at least 2 maps");
  }
  std::vector<double> out;
  out.reserve(maps.size() * (maps.size() - 1) / 2);
  for (std::size_t i = 0; i + 1 < maps.size(); ++i) {
    for (std::size_t j = i + 1; j < maps.size(); ++j) {
      out.push_back(ssim(maps[i], maps[j]));
    }
  }
  return out;
}

double convergence(const Image& map, const Image& reference) {
  return ssim(map, reference);
}

double delta(DeltaKind kind, double x, double reference, double epsilon) {
  switch (kind) {
    case DeltaKind::kAbs:
      return x - reference;
    case DeltaKind::kRel:
      if (reference == 0.0) {
        throw std::invalid_argument("relative delta with zero reference");
      }
      return (x - reference) / reference;
    case DeltaKind::kNorm:
      if (!(epsilon > 0.0)) {
        throw std::invalid_argument("normalized delta needs epsilon > 0");
      }
      if (x >= reference) return (x - reference) / std::max(1.0 - reference, epsilon);
      return (x - reference) / std::max(reference, epsilon);
  }
  return 0.0;
}

double adjust_minimizing(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw std::invalid_argument("adjust_minimizing: score outside [0, 1]");
  }
  return 1.0 - score;
}

}  // namespace vrise::metrics
