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

// Gold files and the evaluation report.
//
// Gold files are JSON Lines, one object per line; blank lines are skipped.
//   QA:         {"id": "...", "answer": "B", "category": "..."}   category optional
//   summaries:  {"id": "...", "reference": "..."}
//   retrieval:  {"id": "...", "frames": [t, ...], "interval": [s, e], "video_id": "..."}
//               at least one of frames / interval; video_id optional
//
// Results files are the JSON documents written by the ask, summarize and
// locate commands; their "kind" selects the evaluation.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmvir/canonical_json.hpp"
#include "mmvir/metrics.hpp"

namespace mmvir::eval {

struct QaGold {
  std::string id;
  std::string answer;
  std::string category;
};

struct SummaryGold {
  std::string id;
  std::string reference;
};

struct RetrievalGold {
  std::string id;
  std::string video_id;
  std::vector<double> frames;
  std::optional<TimeInterval> interval;
};

/// Parse JSON Lines; errors name the 1-based line. An empty file is an
/// InputError.
std::vector<QaGold> parse_qa_gold(std::string_view text);
std::vector<SummaryGold> parse_summary_gold(std::string_view text);
std::vector<RetrievalGold> parse_retrieval_gold(std::string_view text);

struct MetricRow {
  std::string name;
  double value = 0.0;
  std::size_t count = 0;
};

struct CategoryRow {
  std::string category;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
};

/// One row per category (sorted) followed by "overall"; untagged records
/// fall under "untagged" when any record is tagged. With no tags at all the
/// table is the single "overall" row.
std::vector<CategoryRow> category_breakdown(std::span<const QARecord> records);

struct EvalOptions {
  std::vector<std::size_t> ks{1, 5, 10};
  OverlapMode overlap = OverlapMode::kRecall;
};

struct EvalReport {
  std::string task;  // "qa", "summary" or "retrieval"
  std::vector<MetricRow> metrics;
  std::vector<CategoryRow> categories;
  std::optional<LatencyLog> latency;

  Json to_json() const;
  /// Fixed-width text table for terminals.
  std::string render() const;
};

EvalReport evaluate_qa(const Json& results, std::span<const QaGold> gold);
EvalReport evaluate_summaries(const Json& results, std::span<const SummaryGold> gold);
EvalReport evaluate_retrieval(const Json& results, std::span<const RetrievalGold> gold, const EvalOptions& opts);

/// Dispatches on results["kind"] and reads the matching gold file.
EvalReport eval_report(const Json& results, const std::filesystem::path& gold, const EvalOptions& opts = {});

}  // namespace mmvir::eval
