// Copyright 2026 The mmvir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmvir/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mmvir/error.hpp"

namespace mmvir::synth {

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::range(std::size_t lo, std::size_t hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  while (u <= 0.0) u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  spare_ = r * std::sin(2.0 * std::numbers::pi * v);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * v);
}

PlantedSeries piecewise_series(const PiecewiseSpec& spec) {
  if (spec.frames < 2) throw InputError("synth: need at least 2 frames");
  if (spec.dim == 0) throw InputError("synth: dim must be > 0");
  if (!(spec.fps > 0.0)) throw InputError("synth: fps must be > 0");
  if (spec.noise < 0.0) throw InputError("synth: noise must be >= 0");
  std::size_t prev = 0;
  for (auto cp : spec.change_points) {
    if (cp <= prev || cp >= spec.frames) throw InputError("synth: change points must increase inside (0, frames)");
    prev = cp;
  }

  Rng rng(spec.seed);
  const auto regimes = spec.change_points.size() + 1;
  std::vector<double> centers(regimes * spec.dim);
  for (std::size_t r = 0; r < regimes; ++r) {
    double ss = 0.0;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      const double g = rng.gaussian();
      centers[r * spec.dim + j] = g;
      ss += g * g;
    }
    for (std::size_t j = 0; j < spec.dim; ++j) centers[r * spec.dim + j] /= std::sqrt(ss);
  }

  PlantedSeries out;
  auto& s = out.series;
  s.video_id = spec.video_id;
  s.fps = spec.fps;
  s.dim = spec.dim;
  s.timestamps.resize(spec.frames);
  s.vectors.resize(spec.frames * spec.dim);
  std::size_t regime = 0;
  for (std::size_t i = 0; i < spec.frames; ++i) {
    if (regime < spec.change_points.size() && i == spec.change_points[regime]) ++regime;
    s.timestamps[i] = static_cast<double>(i) / spec.fps;
    for (std::size_t j = 0; j < spec.dim; ++j) {
      s.vectors[i * spec.dim + j] = centers[regime * spec.dim + j] + spec.noise * rng.gaussian();
    }
  }
  normalize_rows(s);
  out.change_points = spec.change_points;
  out.boundaries.push_back(0.0);
  for (auto cp : spec.change_points) out.boundaries.push_back(static_cast<double>(cp) / spec.fps);
  out.boundaries.push_back(s.duration());
  return out;
}

PlantedSeries random_piecewise_series(std::uint64_t seed, std::size_t frames, std::size_t regimes,
                                      std::size_t min_len, double noise, std::size_t dim, double fps,
                                      const std::string& video_id) {
  if (regimes == 0) throw InputError("synth: need at least one regime");
  if (regimes * min_len > frames) throw InputError("synth: regimes do not fit in the frame count");
  Rng rng(seed ^ 0xa5a5a5a5deadbeefULL);
  // Distribute the slack above the minimum lengths with sorted random cuts.
  const auto slack = frames - regimes * min_len;
  std::vector<std::size_t> cuts;
  for (std::size_t r = 0; r + 1 < regimes; ++r) cuts.push_back(rng.range(0, slack));
  std::sort(cuts.begin(), cuts.end());
  PiecewiseSpec spec;
  spec.video_id = video_id;
  spec.frames = frames;
  spec.dim = dim;
  spec.fps = fps;
  spec.noise = noise;
  spec.seed = seed;
  for (std::size_t r = 0; r + 1 < regimes; ++r) spec.change_points.push_back((r + 1) * min_len + cuts[r]);
  return piecewise_series(spec);
}

PlantedSeries hour_long_video(std::uint64_t seed, const std::string& video_id) {
  // 5 to 15 minutes per regime at 0.5 fps = 150 to 450 frames.
  Rng rng(seed);
  PiecewiseSpec spec;
  spec.video_id = video_id;
  spec.frames = 1800;
  spec.dim = 64;
  spec.fps = 0.5;
  spec.noise = 0.01;
  spec.seed = seed;
  std::size_t at = 0;
  while (true) {
    const auto len = rng.range(150, 450);
    if (at + len + 150 > spec.frames) break;
    at += len;
    spec.change_points.push_back(at);
  }
  return piecewise_series(spec);
}

}  // namespace mmvir::synth
