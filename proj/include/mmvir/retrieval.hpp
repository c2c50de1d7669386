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

// Query-time use of built documents.
//
// Timeline summaries are embedded into a flat index. A query retrieves the
// top-k clips by cosine similarity (exhaustive scan), and `expand` inflates
// just those clips into their coarse and fine content for the answerer.
// Summarization skips retrieval and feeds every timeline summary instead.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmvir/document.hpp"
#include "mmvir/gateway.hpp"

namespace mmvir::retrieval {

struct IndexEntry {
  std::string video_id;
  int clip_id = 0;
  TimeInterval interval;
  std::string summary;
  bool operator==(const IndexEntry&) const = default;
};

/// Row i of `matrix` (dim floats, unit norm) embeds entries[i].summary.
class TimelineIndex {
 public:
  TimelineIndex() = default;
  TimelineIndex(std::string fingerprint, std::size_t dim) : fingerprint_(std::move(fingerprint)), dim_(dim) {}

  /// Row is normalized before storage.
  void add(IndexEntry entry, std::span<const double> vector);
  /// Appends another index's rows. Throws InputError on fingerprint or
  /// dimension mismatch.
  void merge(const TimelineIndex& other);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t dim() const { return dim_; }
  const std::string& fingerprint() const { return fingerprint_; }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  std::span<const float> row(std::size_t i) const { return {matrix_.data() + i * dim_, dim_}; }
  const std::vector<float>& matrix() const { return matrix_; }

  bool operator==(const TimelineIndex&) const = default;

 private:
  std::string fingerprint_;
  std::size_t dim_ = 0;
  std::vector<IndexEntry> entries_;
  std::vector<float> matrix_;
};

// Index file (little-endian):
//   "MVIX" | u8 version(=1) | u32 fingerprint_len | fingerprint
//   | u32 dim | u32 count
//   | count x { u32 len | video_id | i32 clip_id | f64 start_s | f64 end_s | u32 len | summary }
//   | count x dim f32 (row-major)
inline constexpr char kIndexMagic[4] = {'M', 'V', 'I', 'X'};
inline constexpr unsigned char kIndexVersion = 1;

std::string serialize_index(const TimelineIndex& index);
TimelineIndex deserialize_index(std::string_view bytes);
void save_index(const TimelineIndex& index, const std::filesystem::path& path);
TimelineIndex load_index(const std::filesystem::path& path);

/// One row per timeline entry of every document (each doc must validate).
TimelineIndex build_index(std::span<const VideoDocument> docs, gw::Gateway& gateway);

struct Hit {
  std::size_t entry = 0;  // row in the index
  double score = 0.0;     // cosine in [-1, 1]
};

struct RetrievalResult {
  std::vector<Hit> hits;  // score non-increasing; ties by (video_id, clip_id)
  std::size_t k = 0;
};

/// Exact top-k against a query embedding of any positive scale.
RetrievalResult rank(const TimelineIndex& index, std::span<const double> query, std::size_t k);

RetrievalResult retrieve(const TimelineIndex& index, const std::string& query, std::size_t k,
                         gw::Gateway& gateway);

enum class ExpandMode { kTextOnly, kVisionOnly, kHybrid };
std::string to_string(ExpandMode m);
ExpandMode expand_mode_from_string(const std::string& s);

struct Provenance {
  std::string video_id;
  int clip_id = 0;
  int subsegment_id = 0;  // 0 for timeline blocks
  bool operator==(const Provenance&) const = default;
};

enum class BlockLevel { kTimeline = 0, kCoarse = 1, kFineText = 2, kFrame = 3 };

struct ContextItem {
  gw::ContextBlock block;
  BlockLevel level = BlockLevel::kTimeline;
  double timestamp_s = 0.0;
  Provenance provenance;
};

struct AssembledContext {
  std::vector<ContextItem> items;

  std::vector<gw::ContextBlock> blocks() const;
  std::size_t count(BlockLevel level) const;
};

/// Renders records as single text blocks.
std::string render_coarse(const CoarseBlock& b);
std::string render_fine(const FinePair& p);

/// Zooms into the retrieved clips. Items are ordered by (video_id,
/// timestamp, level). Throws InputError for a hit that no document contains.
AssembledContext expand(std::span<const VideoDocument> docs, const TimelineIndex& index,
                        const RetrievalResult& result, ExpandMode mode);

struct ContextStats {
  std::size_t blocks = 0;
  std::size_t text_blocks = 0;
  std::size_t frame_blocks = 0;
  std::size_t token_estimate = 0;  // ceil(text chars / 4)
};

ContextStats context_stats(const AssembledContext& ctx);

/// First standalone option label (delimited by non-alphanumerics) among
/// `labels`, scanning left to right.
std::optional<std::string> extract_choice(const std::string& raw, std::span<const std::string> labels);

struct QaOutcome {
  std::optional<std::string> choice;  // nullopt = no-parse
  std::string raw_answer;
  RetrievalResult retrieved;
  ContextStats stats;
};

QaOutcome answer_question(const TimelineIndex& index, std::span<const VideoDocument> docs,
                          const std::string& question, const std::vector<std::string>& options,
                          std::size_t k, ExpandMode mode, gw::Gateway& gateway);

/// Full-timeline context, one text block per clip in order.
AssembledContext timeline_context(const VideoDocument& doc);

struct SummaryOutcome {
  std::string summary;
  ContextStats stats;
};

SummaryOutcome summarize(const VideoDocument& doc, gw::Gateway& gateway);

struct LocatedInterval {
  std::string video_id;
  int clip_id = 0;
  TimeInterval interval;
  double score = 0.0;
};

std::vector<LocatedInterval> locate(const TimelineIndex& index, const std::string& query, std::size_t k,
                                    gw::Gateway& gateway);

}  // namespace mmvir::retrieval
