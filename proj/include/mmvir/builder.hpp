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

// Turns a frame-embedding series into a VideoDocument.
//
//   segment -> for each clip:
//                timeline summary over the clip's frames (1 call)
//                split into sub-segments; for each sub-segment:
//                  action / scene / object records (3 calls)
//                  one spatial description per fine-rate frame (M_k calls)
//
// Progress is checkpointed after every clip, so a build interrupted by a
// gateway failure can resume and still produce the same bytes as a clean run.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mmvir/caption_parse.hpp"
#include "mmvir/document.hpp"
#include "mmvir/gateway.hpp"
#include "mmvir/segmentation.hpp"
#include "mmvir/series.hpp"

namespace mmvir::build {

struct BuildConfig {
  seg::SegmentationConfig segmentation;
  double primary_fps = 0.5;
  double fine_fps = 0.05;
  std::size_t caption_parallelism = 4;
  int parse_retries = 2;
  std::size_t timeline_frame_cap = 64;

  void validate() const;
  /// Everything that influences the output; parallelism is left out.
  Json snapshot() const;
};

struct BuildOptions {
  /// Where to persist per-clip progress; empty disables checkpointing.
  std::filesystem::path checkpoint;
  /// Continue from an existing checkpoint when it matches this build.
  bool resume = false;
};

struct BuildReport {
  double segment_s = 0.0;
  double caption_s = 0.0;
  std::size_t resumed_clips = 0;
};

VideoDocument build_document(const FrameEmbeddingSeries& series, const BuildConfig& cfg,
                             gw::Gateway& gateway, const BuildOptions& opts = {},
                             BuildReport* report = nullptr);

// --- individual stages ------------------------------------------------------------

/// Timeline summary for one clip. Over-long output is retried once with the
/// limit restated, then truncated to the word limit and flagged.
TimelineEntry gen_timeline(std::span<const FrameRef> frames, gw::Gateway& gateway);

CoarseBlock gen_coarse(std::span<const FrameRef> frames, gw::Gateway& gateway, int parse_retries);

FinePair gen_fine(const FrameRef& frame, gw::Gateway& gateway, int parse_retries);

/// Fine-rate targets start_s + j / fine_fps strictly below end_s.
std::vector<double> fine_sample_times(const TimeInterval& sub, double fine_fps);

/// Targets snapped to the nearest primary frame inside `sub` (ties go to the
/// earlier frame). `primary` must be sorted by timestamp.
std::vector<FrameRef> sample_fine_frames(const TimeInterval& sub, double fine_fps,
                                         std::span<const FrameRef> primary);

/// Primary frames of a series as FrameRefs with `<video_id>/<ms>.jpg` locators.
std::vector<FrameRef> frame_table(const FrameEmbeddingSeries& series);

/// At most `cap` frames, thinned uniformly (index floor(i * n / cap)).
std::vector<FrameRef> thin_frames(std::span<const FrameRef> frames, std::size_t cap);

}  // namespace mmvir::build
