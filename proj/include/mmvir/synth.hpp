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

// Synthetic frame-embedding series with planted regime changes, for tests,
// benchmarks and offline demos. Generation is seeded and platform-stable.

#pragma once

#include <cstdint>
#include <vector>

#include "mmvir/series.hpp"

namespace mmvir::synth {

struct PiecewiseSpec {
  std::string video_id = "synth";
  std::size_t frames = 1800;
  std::size_t dim = 64;
  double fps = 0.5;
  /// Index of the first frame of each regime after the first; strictly
  /// increasing and inside (0, frames).
  std::vector<std::size_t> change_points;
  /// Per-coordinate Gaussian noise added before renormalization.
  double noise = 0.01;
  std::uint64_t seed = 1;
};

struct PlantedSeries {
  FrameEmbeddingSeries series;
  std::vector<std::size_t> change_points;
  /// Planted boundaries in seconds: 0, change times, duration.
  std::vector<double> boundaries;
};

/// Each regime is one random unit vector; every frame is that vector plus
/// noise, renormalized.
PlantedSeries piecewise_series(const PiecewiseSpec& spec);

/// `regimes` regimes with random lengths of at least `min_len` frames.
PlantedSeries random_piecewise_series(std::uint64_t seed, std::size_t frames, std::size_t regimes,
                                      std::size_t min_len, double noise, std::size_t dim = 64,
                                      double fps = 0.5, const std::string& video_id = "synth");

/// A one-hour video at 0.5 fps (1,800 frames) with regimes of 5 to 15
/// minutes, the default fixture for end-to-end builds.
PlantedSeries hour_long_video(std::uint64_t seed = 7, const std::string& video_id = "synth_hour");

/// Deterministic splitmix64 stream with uniform and Gaussian draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [lo, hi].
  std::size_t range(std::size_t lo, std::size_t hi);
  double gaussian();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mmvir::synth
