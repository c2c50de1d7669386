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

#include "mmvir/builder.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "mmvir/error.hpp"
#include "mmvir/prompts.hpp"
#include "mmvir/text.hpp"

namespace mmvir::build {

using prompts::PromptId;

void BuildConfig::validate() const {
  segmentation.validate();
  if (!(primary_fps > 0.0)) throw InputError("primary_fps must be > 0");
  if (!(fine_fps > 0.0)) throw InputError("fine_fps must be > 0");
  if (!(fine_fps < primary_fps)) throw InputError("fine_fps must be < primary_fps");
  if (parse_retries < 0) throw InputError("parse_retries must be >= 0");
  if (timeline_frame_cap == 0) throw InputError("timeline_frame_cap must be > 0");
}

Json BuildConfig::snapshot() const {
  auto seg = segmentation.to_json();
  for (auto key : {"percentile_q", "min_clip_s", "sub_max_s", "kts_penalty"}) {
    seg[key] = text::quantize6(seg[key].get<double>());
  }
  return {{"segmentation", seg},
          {"primary_fps", text::quantize6(primary_fps)},
          {"fine_fps", text::quantize6(fine_fps)},
          {"parse_retries", parse_retries},
          {"timeline_frame_cap", timeline_frame_cap}};
}

std::vector<FrameRef> frame_table(const FrameEmbeddingSeries& series) {
  std::vector<FrameRef> out;
  out.reserve(series.size());
  for (double t : series.timestamps) {
    const double q = text::quantize6(t);
    out.push_back({q, frame_locator(series.video_id, q)});
  }
  return out;
}

std::vector<FrameRef> thin_frames(std::span<const FrameRef> frames, std::size_t cap) {
  if (frames.size() <= cap) return {frames.begin(), frames.end()};
  std::vector<FrameRef> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i) out.push_back(frames[i * frames.size() / cap]);
  return out;
}

std::vector<double> fine_sample_times(const TimeInterval& sub, double fine_fps) {
  if (!(fine_fps > 0.0)) throw InputError("fine_fps must be > 0");
  std::vector<double> out;
  for (std::size_t j = 0;; ++j) {
    // Same expression the document validator uses to count M_k.
    const double t = sub.start_s + static_cast<double>(j) / fine_fps;
    if (!(t < sub.end_s)) break;
    out.push_back(t);
  }
  if (out.empty()) out.push_back(sub.start_s);
  return out;
}

namespace {

std::span<const FrameRef> frames_in(std::span<const FrameRef> primary, const TimeInterval& iv) {
  auto lo = std::lower_bound(primary.begin(), primary.end(), iv.start_s,
                             [](const FrameRef& f, double t) { return f.timestamp_s < t; });
  auto hi = std::lower_bound(lo, primary.end(), iv.end_s,
                             [](const FrameRef& f, double t) { return f.timestamp_s < t; });
  return {lo, hi};
}

}  // namespace

std::vector<FrameRef> sample_fine_frames(const TimeInterval& sub, double fine_fps,
                                         std::span<const FrameRef> primary) {
  const auto inside = frames_in(primary, sub);
  if (inside.empty()) {
    throw InputError("no primary frame inside sub-segment [" + text::fixed6(sub.start_s) + ", " +
                     text::fixed6(sub.end_s) + ")");
  }
  std::vector<FrameRef> out;
  for (double t : fine_sample_times(sub, fine_fps)) {
    auto it = std::lower_bound(inside.begin(), inside.end(), t,
                               [](const FrameRef& f, double x) { return f.timestamp_s < x; });
    if (it == inside.end()) {
      --it;
    } else if (it != inside.begin() && (t - std::prev(it)->timestamp_s) <= (it->timestamp_s - t)) {
      --it;
    }
    out.push_back(*it);
  }
  return out;
}

namespace {

std::vector<std::string> locators(std::span<const FrameRef> frames) {
  std::vector<std::string> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.source);
  return out;
}

std::string caption_text(gw::Gateway& g, std::vector<std::string> frames, std::string prompt,
                         PromptId id) {
  gw::CaptionRequest req;
  req.frames = std::move(frames);
  req.prompt = std::move(prompt);
  req.tag = std::string(prompts::get(id).name);
  return g.caption(req).text;
}

CaptionKind kind_of(PromptId id) {
  switch (id) {
    case PromptId::kAction:
      return CaptionKind::kAction;
    case PromptId::kScene:
      return CaptionKind::kScene;
    case PromptId::kObject:
      return CaptionKind::kObject;
    default:
      return CaptionKind::kSpatial;
  }
}

/// Calls the captioner until the output parses, at most parse_retries + 1 times.
std::pair<ParsedCaption, std::string> caption_records(gw::Gateway& g, const std::vector<std::string>& frames,
                                                      PromptId id, int parse_retries) {
  for (int attempt = 0;; ++attempt) {
    auto raw = caption_text(g, frames, std::string(prompts::get(id).text), id);
    try {
      return {parse_caption_list(raw, kind_of(id)), raw};
    } catch (const CaptionParseError& e) {
      if (attempt >= parse_retries) {
        throw CaptionParseError(std::string(prompts::get(id).name) + " caption unparseable after " +
                                    std::to_string(attempt + 1) + " attempts: " + e.what(),
                                e.raw());
      }
    }
  }
}

}  // namespace

TimelineEntry gen_timeline(std::span<const FrameRef> frames, gw::Gateway& gateway) {
  if (frames.empty()) throw InputError("gen_timeline: clip has no frames");
  const auto locs = locators(frames);
  TimelineEntry e;
  e.frames_used = static_cast<int>(frames.size());
  e.summary = caption_text(gateway, locs, std::string(prompts::get(PromptId::kTimeline).text), PromptId::kTimeline);
  if (text::word_count(e.summary) > kTimelineWordLimit) {
    e.summary = caption_text(gateway, locs, prompts::timeline_retry_prompt(), PromptId::kTimeline);
    if (text::word_count(e.summary) > kTimelineWordLimit) {
      e.summary = text::truncate_words(e.summary, kTimelineWordLimit);
      e.truncated = true;
    }
  }
  if (text::trim(e.summary).empty()) throw GatewayError("gen_timeline: empty caption");
  return e;
}

CoarseBlock gen_coarse(std::span<const FrameRef> frames, gw::Gateway& gateway, int parse_retries) {
  if (frames.empty()) throw InputError("gen_coarse: sub-segment has no frames");
  const auto locs = locators(frames);
  CoarseBlock b;
  auto [actions, raw_a] = caption_records(gateway, locs, PromptId::kAction, parse_retries);
  b.actions = std::move(actions.actions);
  b.action_sentinel = actions.sentinel;
  auto [scenes, raw_s] = caption_records(gateway, locs, PromptId::kScene, parse_retries);
  b.scenes = std::move(scenes.scenes);
  b.scene_sentinel = scenes.sentinel;
  auto [objects, raw_o] = caption_records(gateway, locs, PromptId::kObject, parse_retries);
  b.objects = std::move(objects.objects);
  b.object_sentinel = objects.sentinel;
  return b;
}

FinePair gen_fine(const FrameRef& frame, gw::Gateway& gateway, int parse_retries) {
  FinePair p;
  p.frame = frame;
  auto [parsed, raw] = caption_records(gateway, {frame.source}, PromptId::kSpatial, parse_retries);
  p.spatial = std::move(parsed.spatial);
  p.sentinel = parsed.sentinel;
  p.raw_text = std::move(raw);
  return p;
}

// --- orchestration ------------------------------------------------------------------

namespace {

/// Runs tasks[0..n) on up to `workers` threads. Results are written by index,
/// so output never depends on completion order; if several tasks fail, the
/// lowest-indexed failure is rethrown.
void run_parallel(std::vector<std::function<void()>>& tasks, std::size_t workers) {
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, tasks.size() ? tasks.size() : 1);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ClipRepresentation build_clip(std::size_t index, const TimeInterval& clip_iv, std::span<const FrameRef> primary,
                              const BuildConfig& cfg, gw::Gateway& gateway) {
  const auto clip_frames = frames_in(primary, clip_iv);
  if (clip_frames.empty()) {
    throw InputError("clip " + std::to_string(index + 1) + " contains no primary frames");
  }
  auto pieces = seg::split_subsegments(clip_iv, cfg.segmentation.sub_max_s);
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double q = text::quantize6(pieces[k].end_s);
    pieces[k].end_s = q;
    pieces[k + 1].start_s = q;
  }

  ClipRepresentation clip;
  clip.subsegments.resize(pieces.size());
  std::vector<std::vector<FrameRef>> fine_frames(pieces.size());
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    clip.subsegments[k].coarse.subsegment_id = static_cast<int>(k + 1);
    clip.subsegments[k].coarse.interval = pieces[k];
    fine_frames[k] = sample_fine_frames(pieces[k], cfg.fine_fps, primary);
    clip.subsegments[k].fine.resize(fine_frames[k].size());
  }

  std::vector<std::function<void()>> tasks;
  tasks.emplace_back([&] {
    const auto thinned = thin_frames(clip_frames, cfg.timeline_frame_cap);
    clip.timeline = gen_timeline(thinned, gateway);
  });
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    tasks.emplace_back([&, k] {
      const auto sub_frames = frames_in(primary, pieces[k]);
      if (sub_frames.empty()) throw InputError("sub-segment without primary frames");
      auto block = gen_coarse(sub_frames, gateway, cfg.parse_retries);
      block.subsegment_id = static_cast<int>(k + 1);
      block.interval = pieces[k];
      clip.subsegments[k].coarse = std::move(block);
    });
    for (std::size_t m = 0; m < fine_frames[k].size(); ++m) {
      tasks.emplace_back([&, k, m] { clip.subsegments[k].fine[m] = gen_fine(fine_frames[k][m], gateway, cfg.parse_retries); });
    }
  }
  run_parallel(tasks, cfg.caption_parallelism);

  clip.timeline.clip_id = static_cast<int>(index + 1);
  clip.timeline.interval = clip_iv;
  return clip;
}

constexpr int kCheckpointVersion = 1;

Json checkpoint_json(const VideoDocument& partial) {
  auto j = to_json(partial);
  j["kind"] = "build_checkpoint";
  j["schema_version"] = kCheckpointVersion;
  j["cursor"] = partial.clips.size();
  return j;
}

/// Clips from a matching checkpoint; empty when absent or not resumable.
std::vector<ClipRepresentation> load_checkpoint(const std::filesystem::path& path, const VideoDocument& header) {
  if (path.empty() || !std::filesystem::exists(path)) return {};
  const auto j = parse_json(read_file(path), "checkpoint");
  if (j.value("kind", std::string()) != "build_checkpoint" || j.value("schema_version", 0) != kCheckpointVersion) {
    throw SchemaVersionError("checkpoint " + path.string() + " has an unexpected kind or version");
  }
  const bool same = j.at("video_id") == header.video_id && j.at("build_config") == header.build_config &&
                    j.at("boundaries").get<std::vector<double>>() == header.boundaries &&
                    j.at("duration_s").get<double>() == header.duration_s;
  if (!same) throw InputError("checkpoint " + path.string() + " belongs to a different build");
  std::vector<ClipRepresentation> clips;
  for (const auto& c : j.at("clips")) clips.push_back(clip_from_json(c));
  const auto cursor = j.at("cursor").get<std::size_t>();
  if (cursor != clips.size() || cursor > header.boundaries.size() - 1) {
    throw InputError("checkpoint cursor is inconsistent");
  }
  return clips;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

VideoDocument build_document(const FrameEmbeddingSeries& series, const BuildConfig& cfg, gw::Gateway& gateway,
                             const BuildOptions& opts, BuildReport* report) {
  cfg.validate();
  series.validate();
  if (std::abs(series.fps - cfg.primary_fps) > 1e-9) {
    throw InputError("series is sampled at " + text::fixed6(series.fps) + " fps but the build expects " +
                     text::fixed6(cfg.primary_fps));
  }
  BuildReport local;
  auto& rep = report ? *report : local;

  auto t0 = std::chrono::steady_clock::now();
  VideoDocument doc;
  doc.video_id = series.video_id;
  doc.primary_fps = text::quantize6(series.fps);
  doc.duration_s = text::quantize6(series.duration());
  for (double b : seg::segment(series, cfg.segmentation)) doc.boundaries.push_back(text::quantize6(b));
  doc.boundaries.back() = doc.duration_s;
  doc.build_config = cfg.snapshot();
  doc.build_config["captioner"] = gateway.captioner_identity();
  rep.segment_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  if (opts.resume) doc.clips = load_checkpoint(opts.checkpoint, doc);
  rep.resumed_clips = doc.clips.size();
  const auto primary = frame_table(series);
  for (std::size_t i = doc.clips.size(); i + 1 < doc.boundaries.size(); ++i) {
    doc.clips.push_back(build_clip(i, {doc.boundaries[i], doc.boundaries[i + 1]}, primary, cfg, gateway));
    if (!opts.checkpoint.empty()) write_file_atomic(opts.checkpoint, canonical_dump(checkpoint_json(doc)));
  }
  rep.caption_s = seconds_since(t0);

  if (auto v = validate_document(doc); !v.empty()) {
    throw ValidationError("built document failed validation: " + v.front());
  }
  if (!opts.checkpoint.empty()) {
    std::error_code ec;
    std::filesystem::remove(opts.checkpoint, ec);
  }
  return doc;
}

}  // namespace mmvir::build
