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

#include "mmvir/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <utility>

#include "mmvir/error.hpp"
#include "mmvir/porter.hpp"
#include "mmvir/text.hpp"

namespace mmvir::eval {

namespace {

std::string norm_label(std::string_view s) {
  std::string out(text::trim(s));
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

bool label_matches(const std::optional<std::string>& predicted, const std::string& gold) {
  if (!predicted) return false;
  const auto p = norm_label(*predicted);
  return !p.empty() && p == norm_label(gold);
}

double mc_accuracy(std::span<const QARecord> records) {
  if (records.empty()) throw InputError("mc_accuracy: no records");
  std::size_t correct = 0;
  for (const auto& r : records) correct += label_matches(r.predicted, r.gold) ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

double harmonic_mean(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

Prf rouge2_tokens(std::span<const std::string> cand, std::span<const std::string> ref) {
  Prf out;
  out.empty_input = cand.empty() || ref.empty();
  if (cand.size() < 2 || ref.size() < 2) return out;
  std::map<std::pair<std::string_view, std::string_view>, std::size_t> ref_counts;
  for (std::size_t i = 0; i + 1 < ref.size(); ++i) ++ref_counts[{ref[i], ref[i + 1]}];
  std::size_t overlap = 0;
  for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
    auto it = ref_counts.find({cand[i], cand[i + 1]});
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  out.precision = static_cast<double>(overlap) / static_cast<double>(cand.size() - 1);
  out.recall = static_cast<double>(overlap) / static_cast<double>(ref.size() - 1);
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

Prf rouge2(const std::string& candidate, const std::string& reference) {
  const auto c = text::metric_tokens(candidate);
  const auto r = text::metric_tokens(reference);
  return rouge2_tokens(c, r);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Prf rougeL_tokens(std::span<const std::string> cand, std::span<const std::string> ref) {
  Prf out;
  if (cand.empty() || ref.empty()) {
    out.empty_input = true;
    return out;
  }
  const auto l = static_cast<double>(lcs_length(cand, ref));
  out.precision = l / static_cast<double>(cand.size());
  out.recall = l / static_cast<double>(ref.size());
  out.f1 = harmonic_mean(out.precision, out.recall);
  return out;
}

Prf rougeL(const std::string& candidate, const std::string& reference) {
  const auto c = text::metric_tokens(candidate);
  const auto r = text::metric_tokens(reference);
  return rougeL_tokens(c, r);
}

MeteorDetail meteor_tokens(std::span<const std::string> cand, std::span<const std::string> ref) {
  MeteorDetail d;
  if (cand.empty() || ref.empty()) return d;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> align(cand.size(), kNone);  // cand index -> ref index
  std::vector<bool> used(ref.size(), false);

  auto stage = [&](const std::vector<std::string>& ckeys, const std::vector<std::string>& rkeys) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (align[i] != kNone) continue;
      std::size_t pick = kNone;
      if (i > 0 && align[i - 1] != kNone) {
        const auto next = align[i - 1] + 1;
        if (next < ref.size() && !used[next] && rkeys[next] == ckeys[i]) pick = next;
      }
      if (pick == kNone) {
        for (std::size_t j = 0; j < ref.size(); ++j) {
          if (!used[j] && rkeys[j] == ckeys[i]) {
            pick = j;
            break;
          }
        }
      }
      if (pick != kNone) {
        align[i] = pick;
        used[pick] = true;
      }
    }
  };

  const std::vector<std::string> cexact(cand.begin(), cand.end());
  const std::vector<std::string> rexact(ref.begin(), ref.end());
  stage(cexact, rexact);
  std::vector<std::string> cstem, rstem;
  for (const auto& t : cand) cstem.push_back(text::porter_stem(t));
  for (const auto& t : ref) rstem.push_back(text::porter_stem(t));
  stage(cstem, rstem);

  std::size_t prev_c = kNone, prev_r = kNone;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (align[i] == kNone) continue;
    ++d.matches;
    const bool extends = prev_c != kNone && i == prev_c + 1 && align[i] == prev_r + 1;
    if (!extends) ++d.chunks;
    prev_c = i;
    prev_r = align[i];
  }
  if (d.matches == 0) return d;
  const auto m = static_cast<double>(d.matches);
  d.precision = m / static_cast<double>(cand.size());
  d.recall = m / static_cast<double>(ref.size());
  d.fmean = 10.0 * d.precision * d.recall / (d.recall + 9.0 * d.precision);
  const double frag = static_cast<double>(d.chunks) / m;
  d.penalty = 0.5 * frag * frag * frag;
  d.score = d.fmean * (1.0 - d.penalty);
  return d;
}

MeteorDetail meteor_detail(const std::string& candidate, const std::string& reference) {
  const auto c = text::metric_tokens(candidate);
  const auto r = text::metric_tokens(reference);
  return meteor_tokens(c, r);
}

double meteor(const std::string& candidate, const std::string& reference) {
  return meteor_detail(candidate, reference).score;
}

SummaryScores score_summaries(std::span<const SummaryPair> pairs) {
  if (pairs.empty()) throw InputError("score_summaries: no pairs");
  SummaryScores out;
  for (const auto& p : pairs) {
    const auto c = text::metric_tokens(p.candidate);
    const auto r = text::metric_tokens(p.reference);
    SummaryScore s{p.id, rouge2_tokens(c, r), rougeL_tokens(c, r), meteor_tokens(c, r).score};
    out.rouge2_mean.precision += s.rouge2.precision;
    out.rouge2_mean.recall += s.rouge2.recall;
    out.rouge2_mean.f1 += s.rouge2.f1;
    out.rougeL_mean.precision += s.rougeL.precision;
    out.rougeL_mean.recall += s.rougeL.recall;
    out.rougeL_mean.f1 += s.rougeL.f1;
    out.meteor_mean += s.meteor;
    out.items.push_back(std::move(s));
  }
  const auto n = static_cast<double>(pairs.size());
  for (auto* prf : {&out.rouge2_mean, &out.rougeL_mean}) {
    prf->precision /= n;
    prf->recall /= n;
    prf->f1 /= n;
  }
  out.meteor_mean /= n;
  return out;
}

// --- temporal ----------------------------------------------------------------------

std::string to_string(OverlapMode m) { return m == OverlapMode::kIoU ? "iou" : "recall"; }

OverlapMode overlap_mode_from_string(const std::string& s) {
  if (s == "recall") return OverlapMode::kRecall;
  if (s == "iou") return OverlapMode::kIoU;
  throw InputError("unknown overlap mode '" + s + "' (expected recall or iou)");
}

namespace {

double merged_length(std::vector<TimeInterval>& v) {
  std::erase_if(v, [](const TimeInterval& i) { return !(i.end_s > i.start_s); });
  std::sort(v.begin(), v.end(), [](const TimeInterval& a, const TimeInterval& b) { return a.start_s < b.start_s; });
  double total = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    double s = v[i].start_s, e = v[i].end_s;
    for (++i; i < v.size() && v[i].start_s <= e; ++i) e = std::max(e, v[i].end_s);
    total += e - s;
  }
  return total;
}

std::vector<TimeInterval> top_k_for(const RetrievalCase& c, std::size_t k) {
  std::vector<TimeInterval> out;
  const auto n = std::min(k, c.retrieved.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = c.retrieved[i];
    if (c.video_id.empty() || r.video_id.empty() || r.video_id == c.video_id) out.push_back(r.interval);
  }
  return out;
}

}  // namespace

double union_length(std::vector<TimeInterval> intervals) { return merged_length(intervals); }

double covered_length(std::vector<TimeInterval> intervals, const TimeInterval& window) {
  for (auto& iv : intervals) {
    iv.start_s = std::max(iv.start_s, window.start_s);
    iv.end_s = std::min(iv.end_s, window.end_s);
  }
  return merged_length(intervals);
}

bool case_hit_at_k(const RetrievalCase& c, std::size_t k) {
  for (const auto& iv : top_k_for(c, k)) {
    for (double t : c.gt_frames) {
      if (iv.contains(t)) return true;
    }
  }
  return false;
}

double case_overlap_at_k(const RetrievalCase& c, std::size_t k, OverlapMode mode) {
  if (!c.gt_interval || !(c.gt_interval->end_s > c.gt_interval->start_s)) {
    throw InputError("overlap: case '" + c.id + "' has no GT interval of positive length");
  }
  const auto& gt = *c.gt_interval;
  auto top = top_k_for(c, k);
  const double inter = covered_length(top, gt);
  if (mode == OverlapMode::kRecall) return inter / (gt.end_s - gt.start_s);
  const double uni = union_length(std::move(top)) + (gt.end_s - gt.start_s) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double precision_at_k(std::span<const RetrievalCase> cases, std::size_t k) {
  if (k == 0) throw InputError("precision_at_k: K must be >= 1");
  std::size_t n = 0, hits = 0;
  for (const auto& c : cases) {
    if (c.gt_frames.empty()) continue;
    ++n;
    hits += case_hit_at_k(c, k) ? 1 : 0;
  }
  if (n == 0) throw InputError("precision_at_k: no cases with ground-truth frames");
  return static_cast<double>(hits) / static_cast<double>(n);
}

double overlap_at_k(std::span<const RetrievalCase> cases, std::size_t k, OverlapMode mode) {
  if (k == 0) throw InputError("overlap_at_k: K must be >= 1");
  std::size_t n = 0;
  double sum = 0.0;
  for (const auto& c : cases) {
    if (!c.gt_interval) continue;
    ++n;
    sum += case_overlap_at_k(c, k, mode);
  }
  if (n == 0) throw InputError("overlap_at_k: no cases with a ground-truth interval");
  return sum / static_cast<double>(n);
}

// --- latency ------------------------------------------------------------------------

LatencyLog& LatencyLog::operator+=(const LatencyLog& o) {
  segment_s += o.segment_s;
  caption_s += o.caption_s;
  index_s += o.index_s;
  answer_s += o.answer_s;
  return *this;
}

Json LatencyLog::to_json() const {
  return {{"segment_s", segment_s},
          {"caption_s", caption_s},
          {"index_s", index_s},
          {"answer_s", answer_s},
          {"total_s", total()}};
}

LatencyLog LatencyLog::from_json(const Json& j) {
  if (!j.is_object()) throw InputError("latency: expected an object");
  LatencyLog l;
  auto get = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number() || j[key].get<double>() < 0.0) {
      throw InputError(std::string("latency.") + key + ": expected a non-negative number");
    }
    dst = j[key].get<double>();
  };
  get("segment_s", l.segment_s);
  get("caption_s", l.caption_s);
  get("index_s", l.index_s);
  get("answer_s", l.answer_s);
  return l;
}

}  // namespace mmvir::eval
