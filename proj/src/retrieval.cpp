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

#include "mmvir/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>

#include "mmvir/canonical_json.hpp"
#include "mmvir/error.hpp"
#include "mmvir/text.hpp"

namespace mmvir::retrieval {

// --- index -------------------------------------------------------------------

void TimelineIndex::add(IndexEntry entry, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw InputError("index: vector has dimension " + std::to_string(vector.size()) + ", index expects " +
                     std::to_string(dim_));
  }
  double ss = 0.0;
  for (double x : vector) ss += x * x;
  const double n = std::sqrt(ss);
  if (!(n > 0.0) || !std::isfinite(n)) throw InputError("index: zero or non-finite vector");
  for (double x : vector) matrix_.push_back(static_cast<float>(x / n));
  entries_.push_back(std::move(entry));
}

void TimelineIndex::merge(const TimelineIndex& other) {
  if (empty() && fingerprint_.empty()) {
    *this = other;
    return;
  }
  if (other.fingerprint_ != fingerprint_) {
    throw InputError("index: cannot merge embedder fingerprints '" + fingerprint_ + "' and '" +
                     other.fingerprint_ + "'");
  }
  if (other.dim_ != dim_) throw InputError("index: cannot merge different dimensions");
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
  matrix_.insert(matrix_.end(), other.matrix_.begin(), other.matrix_.end());
}

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_str(std::string& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(std::string_view b) : b_(b) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(b_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw ParseError("index: truncated file", pos_);
  }
  std::string_view b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_index(const TimelineIndex& index) {
  std::string out(kIndexMagic, 4);
  put<std::uint8_t>(out, kIndexVersion);
  put_str(out, index.fingerprint());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(index.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(index.size()));
  for (const auto& e : index.entries()) {
    put_str(out, e.video_id);
    put<std::int32_t>(out, e.clip_id);
    put<double>(out, e.interval.start_s);
    put<double>(out, e.interval.end_s);
    put_str(out, e.summary);
  }
  for (float f : index.matrix()) put<float>(out, f);
  return out;
}

TimelineIndex deserialize_index(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kIndexMagic, 4)) {
    throw ParseError("index: bad magic", 0);
  }
  r.get<std::uint32_t>();
  if (const auto v = r.get<std::uint8_t>(); v != kIndexVersion) {
    throw SchemaVersionError("index: unsupported version " + std::to_string(v));
  }
  auto fp = r.str();
  const auto dim = r.get<std::uint32_t>();
  const auto count = r.get<std::uint32_t>();
  std::vector<IndexEntry> entries;
  entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    IndexEntry e;
    e.video_id = r.str();
    e.clip_id = r.get<std::int32_t>();
    e.interval.start_s = r.get<double>();
    e.interval.end_s = r.get<double>();
    e.summary = r.str();
    entries.push_back(std::move(e));
  }
  TimelineIndex idx(std::move(fp), dim);
  std::vector<double> row(dim);
  for (std::uint32_t i = 0; i < count; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) row[j] = r.get<float>();
    idx.add(std::move(entries[i]), row);
  }
  if (!r.done()) throw ParseError("index: trailing bytes", r.pos());
  return idx;
}

void save_index(const TimelineIndex& index, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_index(index));
}

TimelineIndex load_index(const std::filesystem::path& path) { return deserialize_index(read_file(path)); }

TimelineIndex build_index(std::span<const VideoDocument> docs, gw::Gateway& gateway) {
  TimelineIndex idx(gateway.embedder_fingerprint(), gateway.config().embed_dim);
  for (const auto& doc : docs) {
    if (auto v = validate_document(doc); !v.empty()) {
      throw ValidationError("build_index: document '" + doc.video_id + "' is invalid: " + v.front());
    }
    for (const auto& clip : doc.clips) {
      const auto& tl = clip.timeline;
      const auto emb = gateway.embed({gw::EmbedKind::kText, tl.summary, "", "index"});
      idx.add({doc.video_id, tl.clip_id, tl.interval, tl.summary}, emb.vector);
    }
  }
  return idx;
}

// --- ranking -------------------------------------------------------------------

RetrievalResult rank(const TimelineIndex& index, std::span<const double> query, std::size_t k) {
  if (index.empty()) throw InputError("retrieve: index is empty");
  if (k == 0) throw InputError("retrieve: k must be >= 1");
  if (query.size() != index.dim()) throw InputError("retrieve: query dimension does not match the index");
  double ss = 0.0;
  for (double x : query) ss += x * x;
  const double qn = std::sqrt(ss);
  if (!(qn > 0.0) || !std::isfinite(qn)) throw InputError("retrieve: zero or non-finite query vector");
  std::vector<double> q(query.begin(), query.end());
  for (auto& x : q) x /= qn;

  std::vector<Hit> hits(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto r = index.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += static_cast<double>(r[j]) * q[j];
    hits[i] = {i, s};
  }
  const auto& ents = index.entries();
  auto before = [&](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& ea = ents[a.entry];
    const auto& eb = ents[b.entry];
    if (ea.video_id != eb.video_id) return ea.video_id < eb.video_id;
    if (ea.clip_id != eb.clip_id) return ea.clip_id < eb.clip_id;
    return a.entry < b.entry;
  };
  const auto take = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(), before);
  hits.resize(take);
  return {std::move(hits), k};
}

RetrievalResult retrieve(const TimelineIndex& index, const std::string& query, std::size_t k,
                         gw::Gateway& gateway) {
  if (index.empty()) throw InputError("retrieve: index is empty");
  if (gateway.embedder_fingerprint() != index.fingerprint()) {
    throw InputError("retrieve: gateway embedder '" + gateway.embedder_fingerprint() +
                     "' does not match index fingerprint '" + index.fingerprint() + "'");
  }
  const auto emb = gateway.embed({gw::EmbedKind::kText, query, "", "query"});
  return rank(index, emb.vector, k);
}

// --- expansion ---------------------------------------------------------------------

std::string to_string(ExpandMode m) {
  switch (m) {
    case ExpandMode::kTextOnly:
      return "text_only";
    case ExpandMode::kVisionOnly:
      return "vision_only";
    case ExpandMode::kHybrid:
      return "hybrid";
  }
  return "hybrid";
}

ExpandMode expand_mode_from_string(const std::string& s) {
  if (s == "text_only" || s == "text") return ExpandMode::kTextOnly;
  if (s == "vision_only" || s == "vision") return ExpandMode::kVisionOnly;
  if (s == "hybrid") return ExpandMode::kHybrid;
  throw InputError("unknown expand mode '" + s + "' (expected text_only, vision_only or hybrid)");
}

std::vector<gw::ContextBlock> AssembledContext::blocks() const {
  std::vector<gw::ContextBlock> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.block);
  return out;
}

std::size_t AssembledContext::count(BlockLevel level) const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [&](const ContextItem& i) { return i.level == level; }));
}

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::string span_label(const TimeInterval& iv) {
  return "[" + text::fixed6(iv.start_s) + "s - " + text::fixed6(iv.end_s) + "s]";
}

}  // namespace

std::string render_coarse(const CoarseBlock& b) {
  std::string out = "Sub-segment " + std::to_string(b.subsegment_id) + " " + span_label(b.interval) + ".";
  out += " Actions: ";
  if (b.action_sentinel) {
    out += "none detected.";
  } else {
    std::vector<std::string> a;
    for (const auto& r : b.actions) a.push_back(r.description);
    out += join(a, "; ") + ".";
  }
  out += " Scenes: ";
  if (b.scene_sentinel) {
    out += "none detected.";
  } else {
    std::vector<std::string> s;
    for (const auto& r : b.scenes) {
      s.push_back(r.description + " (setting: " + r.setting + ", action: " + r.action + ")");
    }
    out += join(s, "; ") + ".";
  }
  out += " Objects: ";
  if (b.object_sentinel) {
    out += "none detected.";
  } else {
    std::vector<std::string> o;
    for (const auto& r : b.objects) {
      auto s = r.name + " x" + std::to_string(r.count);
      if (!r.attributes.empty()) s += " (" + join(r.attributes, ", ") + ")";
      o.push_back(s);
    }
    out += join(o, "; ") + ".";
  }
  return out;
}

std::string render_fine(const FinePair& p) {
  std::string out = "Frame at " + text::fixed6(p.frame.timestamp_s) + "s: ";
  if (p.sentinel) return out + "no objects detected.";
  std::vector<std::string> parts;
  for (const auto& r : p.spatial) {
    auto s = r.object_name + " x" + std::to_string(r.count);
    if (!r.attributes.empty()) s += " (" + join(r.attributes, ", ") + ")";
    if (!r.spatial_relationships.empty()) s += " " + join(r.spatial_relationships, ", ");
    parts.push_back(s);
  }
  return out + join(parts, "; ") + ".";
}

AssembledContext expand(std::span<const VideoDocument> docs, const TimelineIndex& index,
                        const RetrievalResult& result, ExpandMode mode) {
  std::map<std::string, const VideoDocument*> by_id;
  for (const auto& d : docs) by_id[d.video_id] = &d;

  AssembledContext ctx;
  const bool want_text = mode != ExpandMode::kVisionOnly;
  const bool want_frames = mode != ExpandMode::kTextOnly;
  for (const auto& hit : result.hits) {
    if (hit.entry >= index.size()) throw InputError("expand: hit refers to a row outside the index");
    const auto& e = index.entries()[hit.entry];
    const auto it = by_id.find(e.video_id);
    if (it == by_id.end() || e.clip_id < 1 || static_cast<std::size_t>(e.clip_id) > it->second->clips.size()) {
      throw InputError("expand: dangling clip reference " + e.video_id + "#" + std::to_string(e.clip_id));
    }
    const auto& clip = it->second->clips[static_cast<std::size_t>(e.clip_id - 1)];
    const Provenance clip_prov{e.video_id, e.clip_id, 0};
    if (want_text) {
      ctx.items.push_back({gw::ContextBlock::text(clip.timeline.summary), BlockLevel::kTimeline,
                           clip.timeline.interval.start_s, clip_prov});
    }
    for (const auto& sub : clip.subsegments) {
      const Provenance prov{e.video_id, e.clip_id, sub.coarse.subsegment_id};
      if (want_text) {
        ctx.items.push_back({gw::ContextBlock::text(render_coarse(sub.coarse)), BlockLevel::kCoarse,
                             sub.coarse.interval.start_s, prov});
      }
      for (const auto& fp : sub.fine) {
        if (want_text) {
          ctx.items.push_back({gw::ContextBlock::text(render_fine(fp)), BlockLevel::kFineText,
                               fp.frame.timestamp_s, prov});
        }
        if (want_frames) {
          ctx.items.push_back({gw::ContextBlock::frame(fp.frame.source), BlockLevel::kFrame,
                               fp.frame.timestamp_s, prov});
        }
      }
    }
  }
  std::stable_sort(ctx.items.begin(), ctx.items.end(), [](const ContextItem& a, const ContextItem& b) {
    if (a.provenance.video_id != b.provenance.video_id) return a.provenance.video_id < b.provenance.video_id;
    if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
    return a.level < b.level;
  });
  return ctx;
}

ContextStats context_stats(const AssembledContext& ctx) {
  ContextStats s;
  std::size_t chars = 0;
  for (const auto& it : ctx.items) {
    ++s.blocks;
    if (it.block.kind == gw::ContextBlock::Kind::kText) {
      ++s.text_blocks;
      chars += it.block.content.size();
    } else {
      ++s.frame_blocks;
    }
  }
  s.token_estimate = (chars + 3) / 4;
  return s;
}

std::optional<std::string> extract_choice(const std::string& raw, std::span<const std::string> labels) {
  auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (std::size_t pos = 0; pos < raw.size(); ++pos) {
    if (pos > 0 && is_alnum(raw[pos - 1])) continue;
    for (const auto& label : labels) {
      if (label.empty() || raw.compare(pos, label.size(), label) != 0) continue;
      const auto end = pos + label.size();
      if (end == raw.size() || !is_alnum(raw[end])) return label;
    }
  }
  return std::nullopt;
}

namespace {

std::string qa_question(const std::string& question, const std::vector<std::string>& options) {
  std::string q = question;
  if (!options.empty()) {
    q += "\nOptions:";
    for (std::size_t i = 0; i < options.size(); ++i) q += "\n" + gw::option_label(i) + ". " + options[i];
    q += "\nAnswer with the letter of the correct option.";
  }
  return q;
}

}  // namespace

QaOutcome answer_question(const TimelineIndex& index, std::span<const VideoDocument> docs,
                          const std::string& question, const std::vector<std::string>& options,
                          std::size_t k, ExpandMode mode, gw::Gateway& gateway) {
  QaOutcome out;
  out.retrieved = retrieve(index, question, k, gateway);
  const auto ctx = expand(docs, index, out.retrieved, mode);
  out.stats = context_stats(ctx);
  gw::AnswerRequest req;
  req.context = ctx.blocks();
  req.question = qa_question(question, options);
  req.options = options;
  req.tag = "qa";
  out.raw_answer = gateway.answer(req).text;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < options.size(); ++i) labels.push_back(gw::option_label(i));
  out.choice = extract_choice(out.raw_answer, labels);
  return out;
}

AssembledContext timeline_context(const VideoDocument& doc) {
  AssembledContext ctx;
  for (const auto& clip : doc.clips) {
    const auto& tl = clip.timeline;
    ctx.items.push_back({gw::ContextBlock::text(tl.summary), BlockLevel::kTimeline, tl.interval.start_s,
                         {doc.video_id, tl.clip_id, 0}});
  }
  return ctx;
}

SummaryOutcome summarize(const VideoDocument& doc, gw::Gateway& gateway) {
  if (doc.clips.empty()) throw InputError("summarize: document has no clips");
  const auto ctx = timeline_context(doc);
  gw::AnswerRequest req;
  req.context = ctx.blocks();
  req.question =
      "The context lists, in order, a one-sentence description of every part of a long video. "
      "Write a comprehensive summary of the whole video.";
  req.tag = "summarize";
  return {gateway.answer(req).text, context_stats(ctx)};
}

std::vector<LocatedInterval> locate(const TimelineIndex& index, const std::string& query, std::size_t k,
                                    gw::Gateway& gateway) {
  const auto res = retrieve(index, query, k, gateway);
  std::vector<LocatedInterval> out;
  for (const auto& h : res.hits) {
    const auto& e = index.entries()[h.entry];
    out.push_back({e.video_id, e.clip_id, e.interval, h.score});
  }
  return out;
}

}  // namespace mmvir::retrieval
