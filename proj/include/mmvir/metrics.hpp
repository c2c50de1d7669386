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

// Evaluation metrics. All functions are pure.
//
// Text metrics share one tokenization: lowercase, ASCII punctuation split
// into separate tokens, whitespace separated.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmvir/document.hpp"

namespace mmvir::eval {

// --- multiple choice ----------------------------------------------------------

struct QARecord {
  std::string id;
  std::optional<std::string> predicted;  // nullopt = no-parse
  std::string gold;
  std::string category;  // empty = untagged
};

/// Labels compared after trimming and uppercasing.
bool label_matches(const std::optional<std::string>& predicted, const std::string& gold);

/// Fraction of correct records; no-parse counts as incorrect. Throws
/// InputError when `records` is empty.
double mc_accuracy(std::span<const QARecord> records);

// --- text overlap ----------------------------------------------------------------

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_input = false;  // one side had no tokens
};

double harmonic_mean(double p, double r);

/// Bigram multiset overlap. Zero when either side has fewer than 2 tokens.
Prf rouge2(const std::string& candidate, const std::string& reference);
Prf rouge2_tokens(std::span<const std::string> cand, std::span<const std::string> ref);

/// Longest common subsequence over tokens.
Prf rougeL(const std::string& candidate, const std::string& reference);
Prf rougeL_tokens(std::span<const std::string> cand, std::span<const std::string> ref);
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

struct MeteorDetail {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

/// Unigram alignment: exact matches first, then Porter-stem matches, each
/// token used at most once. Within a stage, a candidate token prefers the
/// reference position right after its predecessor's match, otherwise the
/// leftmost free one. No synonym stage.
MeteorDetail meteor_detail(const std::string& candidate, const std::string& reference);
MeteorDetail meteor_tokens(std::span<const std::string> cand, std::span<const std::string> ref);
double meteor(const std::string& candidate, const std::string& reference);

struct SummaryPair {
  std::string id;
  std::string candidate;
  std::string reference;
};

struct SummaryScore {
  std::string id;
  Prf rouge2;
  Prf rougeL;
  double meteor = 0.0;
};

struct SummaryScores {
  std::vector<SummaryScore> items;
  Prf rouge2_mean;
  Prf rougeL_mean;
  double meteor_mean = 0.0;
};

/// Per-pair scores and their arithmetic means. Throws InputError when empty.
SummaryScores score_summaries(std::span<const SummaryPair> pairs);

// --- temporal retrieval -------------------------------------------------------------

struct RetrievedSpan {
  std::string video_id;  // empty matches any case
  TimeInterval interval;
};

struct RetrievalCase {
  std::string id;
  std::string video_id;                // empty = single-video evaluation
  std::vector<RetrievedSpan> retrieved;  // rank order
  std::vector<double> gt_frames;
  std::optional<TimeInterval> gt_interval;
};

enum class OverlapMode { kRecall, kIoU };
std::string to_string(OverlapMode m);
OverlapMode overlap_mode_from_string(const std::string& s);

/// Total length of the union of half-open intervals.
double union_length(std::vector<TimeInterval> intervals);
/// Length of (union of `intervals`) intersected with `window`.
double covered_length(std::vector<TimeInterval> intervals, const TimeInterval& window);

bool case_hit_at_k(const RetrievalCase& c, std::size_t k);
double case_overlap_at_k(const RetrievalCase& c, std::size_t k, OverlapMode mode = OverlapMode::kRecall);

/// Over cases with GT frames. Throws InputError when there are none or k == 0.
double precision_at_k(std::span<const RetrievalCase> cases, std::size_t k);
/// Over cases with a GT interval of positive length.
double overlap_at_k(std::span<const RetrievalCase> cases, std::size_t k, OverlapMode mode = OverlapMode::kRecall);

// --- latency ------------------------------------------------------------------------

struct LatencyLog {
  double segment_s = 0.0;
  double caption_s = 0.0;
  double index_s = 0.0;
  double answer_s = 0.0;

  double total() const { return segment_s + caption_s + index_s + answer_s; }
  LatencyLog& operator+=(const LatencyLog& o);
  Json to_json() const;
  static LatencyLog from_json(const Json& j);
};

}  // namespace mmvir::eval
