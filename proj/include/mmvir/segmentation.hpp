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

// Event boundary detection over a frame-embedding series.
//
// Two methods are available. The percentile method looks at the similarity of
// consecutive frames and cuts at deep troughs (below a low percentile of the
// whole signal). KTS (kernel temporal segmentation) picks the change points
// minimizing within-segment kernel variance plus a model-size penalty.
// Both return boundaries t_0 = 0 < t_1 < ... < t_N = duration.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmvir/canonical_json.hpp"
#include "mmvir/document.hpp"
#include "mmvir/series.hpp"

namespace mmvir::seg {

enum class Method { kPercentile, kKts };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SegmentationConfig {
  Method method = Method::kPercentile;
  double percentile_q = 2.0;
  double min_clip_s = 300.0;
  double sub_max_s = 100.0;
  double kts_penalty = 1.0;
  std::optional<std::size_t> kts_max_changepoints;

  /// Throws InputError unless 0 < q < 100, min_clip_s > sub_max_s > 0 and
  /// kts_penalty >= 0.
  void validate() const;
  Json to_json() const;
  static SegmentationConfig from_json(const Json& j);
};

struct SimilaritySignal {
  std::vector<double> values;
  std::vector<double> timestamps;  // midpoint of each consecutive pair
  std::size_t size() const { return values.size(); }
};

SimilaritySignal consecutive_similarity(const FrameEmbeddingSeries& series);

/// Nearest-rank percentile: element ceil(q/100 * m) - 1 of the sorted values.
double percentile_threshold(std::span<const double> values, double q);
inline double percentile_threshold(const SimilaritySignal& s, double q) {
  return percentile_threshold(s.values, q);
}

/// Sub-threshold local minima, accepted deepest-first subject to min_clip_s
/// spacing from each other and from both ends.
std::vector<double> detect_turning_points(const SimilaritySignal& signal, double threshold,
                                          double min_clip_s, double duration_s);

// --- KTS ------------------------------------------------------------------

struct KtsResult {
  std::vector<std::size_t> change_points;  // index of the first frame of each new segment
  double cost = 0.0;                       // sum of segment costs, before penalty
};

/// Runs the change-point DP over an explicit row-major matrix (n x d). Rows
/// are used as-is. With `forced_m`, exactly that many change points are
/// placed and the penalty is ignored.
KtsResult kts_changepoints(std::span<const double> rows, std::size_t n, std::size_t d,
                           double penalty, std::optional<std::size_t> max_changepoints,
                           std::optional<std::size_t> forced_m = std::nullopt);

/// Minimal within-segment cost for every m in [0, max_m], no penalty.
std::vector<double> kts_cost_by_m(std::span<const double> rows, std::size_t n, std::size_t d,
                                  std::size_t max_m);

/// Merges any clip shorter than min_clip_s into its shorter neighbour until
/// none remain (or a single clip is left).
std::vector<double> enforce_min_clip(std::vector<double> boundaries, double min_clip_s);

std::vector<double> kts_segment(const FrameEmbeddingSeries& series, const SegmentationConfig& cfg);

/// Dispatches on cfg.method.
std::vector<double> segment(const FrameEmbeddingSeries& series, const SegmentationConfig& cfg);

/// k = max(1, floor(D / sub_max_s)) equal pieces tiling `clip`.
std::vector<TimeInterval> split_subsegments(const TimeInterval& clip, double sub_max_s);

// --- diagnostics ------------------------------------------------------------

inline constexpr std::array<double, 7> kReportPercentiles = {1, 2, 5, 25, 50, 75, 95};

struct SignalReport {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::size_t> histogram;  // 50 equal-width bins over [min, max]
  std::vector<std::pair<double, double>> percentiles;  // (q, value)
  std::size_t below_p2 = 0;

  Json to_json() const;
};

inline constexpr std::size_t kHistogramBins = 50;

SignalReport signal_report(const SimilaritySignal& signal);

}  // namespace mmvir::seg
