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

#include "mmvir/eval_report.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "mmvir/error.hpp"
#include "mmvir/text.hpp"

namespace mmvir::eval {

namespace {

void for_each_record(std::string_view text, const char* what,
                     const std::function<void(std::size_t, const Json&)>& fn) {
  std::size_t line_no = 0, records = 0, pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text::trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw InputError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw InputError(std::string(what) + " line " + std::to_string(line_no) + ": expected a JSON object");
    }
    try {
      fn(line_no, j);
    } catch (const Json::exception& e) {
      throw InputError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
    ++records;
  }
  if (records == 0) throw InputError(std::string(what) + ": file has no records");
}

std::string req_string(const Json& j, const char* key, std::size_t line, const char* what) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw InputError(std::string(what) + " line " + std::to_string(line) + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

std::string id_of(const Json& j, std::size_t line, const char* what) {
  if (j.contains("id") && j["id"].is_number_integer()) return std::to_string(j["id"].get<long long>());
  return req_string(j, "id", line, what);
}

template <typename T>
void check_unique(const std::vector<T>& v, const char* what) {
  std::set<std::string> seen;
  for (const auto& g : v) {
    if (!seen.insert(g.id).second) throw InputError(std::string(what) + ": duplicate id '" + g.id + "'");
  }
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const Json& results_array(const Json& results) {
  if (!results.contains("results") || !results["results"].is_array()) {
    throw InputError("results file has no 'results' array");
  }
  return results["results"];
}

std::string result_id(const Json& r) {
  if (!r.contains("id")) throw InputError("results entry without 'id'");
  return r["id"].is_string() ? r["id"].get<std::string>() : r["id"].dump();
}

std::optional<LatencyLog> latency_of(const Json& results) {
  if (!results.contains("latency")) return std::nullopt;
  return LatencyLog::from_json(results["latency"]);
}

}  // namespace

std::vector<QaGold> parse_qa_gold(std::string_view text) {
  std::vector<QaGold> out;
  for_each_record(text, "QA gold", [&](std::size_t line, const Json& j) {
    QaGold g{id_of(j, line, "QA gold"), req_string(j, "answer", line, "QA gold"), ""};
    if (j.contains("category") && !j["category"].is_null()) g.category = j["category"].get<std::string>();
    out.push_back(std::move(g));
  });
  check_unique(out, "QA gold");
  return out;
}

std::vector<SummaryGold> parse_summary_gold(std::string_view text) {
  std::vector<SummaryGold> out;
  for_each_record(text, "summary gold", [&](std::size_t line, const Json& j) {
    out.push_back({id_of(j, line, "summary gold"), req_string(j, "reference", line, "summary gold")});
  });
  check_unique(out, "summary gold");
  return out;
}

std::vector<RetrievalGold> parse_retrieval_gold(std::string_view text) {
  std::vector<RetrievalGold> out;
  for_each_record(text, "retrieval gold", [&](std::size_t line, const Json& j) {
    RetrievalGold g;
    g.id = id_of(j, line, "retrieval gold");
    if (j.contains("video_id")) g.video_id = j["video_id"].get<std::string>();
    if (j.contains("frames")) g.frames = j["frames"].get<std::vector<double>>();
    if (j.contains("interval")) {
      const auto iv = j["interval"].get<std::vector<double>>();
      if (iv.size() != 2 || !(iv[1] > iv[0])) {
        throw InputError("retrieval gold line " + std::to_string(line) + ": interval must be [start, end] with end > start");
      }
      g.interval = TimeInterval{iv[0], iv[1]};
    }
    if (g.frames.empty() && !g.interval) {
      throw InputError("retrieval gold line " + std::to_string(line) + ": needs 'frames' or 'interval'");
    }
    out.push_back(std::move(g));
  });
  check_unique(out, "retrieval gold");
  return out;
}

std::vector<CategoryRow> category_breakdown(std::span<const QARecord> records) {
  std::map<std::string, CategoryRow> by_cat;
  CategoryRow overall{"overall", 0, 0, 0.0};
  bool tagged = false;
  for (const auto& r : records) {
    tagged = tagged || !r.category.empty();
    const bool ok = label_matches(r.predicted, r.gold);
    auto& row = by_cat[r.category.empty() ? "untagged" : r.category];
    ++row.total;
    ++overall.total;
    row.correct += ok ? 1 : 0;
    overall.correct += ok ? 1 : 0;
  }
  std::vector<CategoryRow> out;
  auto finish = [](CategoryRow row) {
    row.accuracy = row.total ? static_cast<double>(row.correct) / static_cast<double>(row.total) : 0.0;
    return row;
  };
  if (tagged) {
    for (auto& [name, row] : by_cat) {
      row.category = name;
      out.push_back(finish(row));
    }
  }
  out.push_back(finish(overall));
  return out;
}

Json EvalReport::to_json() const {
  Json m = Json::array();
  for (const auto& r : metrics) m.push_back({{"name", r.name}, {"value", r.value}, {"count", r.count}});
  Json c = Json::array();
  for (const auto& r : categories) {
    c.push_back({{"category", r.category}, {"correct", r.correct}, {"total", r.total}, {"accuracy", r.accuracy}});
  }
  Json out = {{"kind", "eval_report"}, {"task", task}, {"metrics", m}, {"categories", c}};
  if (latency) out["latency"] = latency->to_json();
  return out;
}

std::string EvalReport::render() const {
  std::string out = "task: " + task + "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-28s %12s %8s\n", "metric", "value", "n");
  out += buf;
  for (const auto& r : metrics) {
    std::snprintf(buf, sizeof buf, "%-28s %12s %8zu\n", r.name.c_str(), pct(r.value).c_str(), r.count);
    out += buf;
  }
  if (!categories.empty()) {
    std::snprintf(buf, sizeof buf, "\n%-28s %12s %8s %8s\n", "category", "accuracy", "correct", "total");
    out += buf;
    for (const auto& r : categories) {
      std::snprintf(buf, sizeof buf, "%-28s %12s %8zu %8zu\n", r.category.c_str(), pct(r.accuracy).c_str(),
                    r.correct, r.total);
      out += buf;
    }
  }
  if (latency) {
    std::snprintf(buf, sizeof buf,
                  "\nlatency (s): segment %.3f  caption %.3f  index %.3f  answer %.3f  total %.3f\n",
                  latency->segment_s, latency->caption_s, latency->index_s, latency->answer_s, latency->total());
    out += buf;
  }
  return out;
}

EvalReport evaluate_qa(const Json& results, std::span<const QaGold> gold) {
  if (gold.empty()) throw InputError("QA gold is empty");
  std::map<std::string, std::optional<std::string>> preds;
  for (const auto& r : results_array(results)) {
    std::optional<std::string> choice;
    if (r.contains("choice") && r["choice"].is_string()) choice = r["choice"].get<std::string>();
    preds[result_id(r)] = choice;
  }
  std::vector<QARecord> records;
  std::size_t missing = 0, no_parse = 0;
  for (const auto& g : gold) {
    const auto it = preds.find(g.id);
    std::optional<std::string> p;
    if (it == preds.end()) {
      ++missing;
    } else {
      p = it->second;
      if (!p) ++no_parse;
    }
    records.push_back({g.id, p, g.answer, g.category});
  }
  EvalReport rep;
  rep.task = "qa";
  rep.metrics.push_back({"accuracy", mc_accuracy(records), records.size()});
  rep.metrics.push_back({"no_parse", static_cast<double>(no_parse), records.size()});
  rep.metrics.push_back({"missing", static_cast<double>(missing), records.size()});
  rep.categories = category_breakdown(records);
  rep.latency = latency_of(results);
  return rep;
}

EvalReport evaluate_summaries(const Json& results, std::span<const SummaryGold> gold) {
  if (gold.empty()) throw InputError("summary gold is empty");
  std::map<std::string, std::string> cands;
  for (const auto& r : results_array(results)) {
    cands[result_id(r)] = r.value("summary", std::string());
  }
  std::vector<SummaryPair> pairs;
  std::size_t missing = 0;
  for (const auto& g : gold) {
    const auto it = cands.find(g.id);
    if (it == cands.end()) ++missing;
    pairs.push_back({g.id, it == cands.end() ? std::string() : it->second, g.reference});
  }
  const auto s = score_summaries(pairs);
  EvalReport rep;
  rep.task = "summary";
  const auto n = pairs.size();
  rep.metrics = {{"rouge2_f1", s.rouge2_mean.f1, n},         {"rouge2_precision", s.rouge2_mean.precision, n},
                 {"rouge2_recall", s.rouge2_mean.recall, n}, {"rougeL_f1", s.rougeL_mean.f1, n},
                 {"rougeL_precision", s.rougeL_mean.precision, n}, {"rougeL_recall", s.rougeL_mean.recall, n},
                 {"meteor", s.meteor_mean, n},               {"missing", static_cast<double>(missing), n}};
  rep.latency = latency_of(results);
  return rep;
}

EvalReport evaluate_retrieval(const Json& results, std::span<const RetrievalGold> gold, const EvalOptions& opts) {
  if (gold.empty()) throw InputError("retrieval gold is empty");
  if (opts.ks.empty()) throw InputError("retrieval eval: no K values");
  std::map<std::string, std::vector<RetrievedSpan>> spans;
  for (const auto& r : results_array(results)) {
    std::vector<RetrievedSpan> v;
    if (r.contains("intervals")) {
      for (const auto& iv : r["intervals"]) {
        v.push_back({iv.value("video_id", std::string()),
                     TimeInterval{iv.at("start_s").get<double>(), iv.at("end_s").get<double>()}});
      }
    }
    spans[result_id(r)] = std::move(v);
  }
  std::vector<RetrievalCase> cases;
  std::size_t missing = 0, with_frames = 0, with_interval = 0;
  for (const auto& g : gold) {
    const auto it = spans.find(g.id);
    if (it == spans.end()) ++missing;
    cases.push_back({g.id, g.video_id, it == spans.end() ? std::vector<RetrievedSpan>{} : it->second, g.frames,
                     g.interval});
    with_frames += g.frames.empty() ? 0 : 1;
    with_interval += g.interval ? 1 : 0;
  }
  EvalReport rep;
  rep.task = "retrieval";
  for (auto k : opts.ks) {
    if (with_frames) rep.metrics.push_back({"precision@" + std::to_string(k), precision_at_k(cases, k), with_frames});
  }
  for (auto k : opts.ks) {
    if (with_interval) {
      rep.metrics.push_back({"overlap@" + std::to_string(k) + (opts.overlap == OverlapMode::kIoU ? "_iou" : ""),
                             overlap_at_k(cases, k, opts.overlap), with_interval});
    }
  }
  rep.metrics.push_back({"missing", static_cast<double>(missing), cases.size()});
  rep.latency = latency_of(results);
  return rep;
}

EvalReport eval_report(const Json& results, const std::filesystem::path& gold, const EvalOptions& opts) {
  if (!results.is_object() || !results.contains("kind")) throw InputError("results file has no 'kind'");
  const auto kind = results["kind"].get<std::string>();
  const auto text = read_file(gold);
  if (kind == "qa_results") return evaluate_qa(results, parse_qa_gold(text));
  if (kind == "summary_results") return evaluate_summaries(results, parse_summary_gold(text));
  if (kind == "locate_results") return evaluate_retrieval(results, parse_retrieval_gold(text), opts);
  throw InputError("cannot evaluate results of kind '" + kind + "'");
}

}  // namespace mmvir::eval
