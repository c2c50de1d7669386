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

#include "mmvir/document.hpp"

#include <cctype>
#include <cmath>
#include <optional>
#include <sstream>

#include "mmvir/error.hpp"
#include "mmvir/text.hpp"

namespace mmvir {

std::string frame_locator(const std::string& video_id, double timestamp_s) {
  const auto ms = static_cast<long long>(std::llround(timestamp_s * 1000.0));
  return video_id + "/" + std::to_string(ms) + ".jpg";
}

bool is_valid_locator(const std::string& locator) {
  const auto slash = locator.rfind('/');
  if (slash == std::string::npos || slash == 0) return false;
  const std::string_view tail = std::string_view(locator).substr(slash + 1);
  if (tail.size() <= 4 || tail.substr(tail.size() - 4) != ".jpg") return false;
  const auto digits = tail.substr(0, tail.size() - 4);
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

namespace {

constexpr double kDurationSlack = 1e-6;

class Violations {
 public:
  template <typename... Parts>
  void add(Parts&&... parts) {
    std::ostringstream ss;
    (ss << ... << parts);
    out_.push_back(ss.str());
  }
  std::vector<std::string> take() { return std::move(out_); }

 private:
  std::vector<std::string> out_;
};

std::string where_clip(std::size_t i) { return " (clip " + std::to_string(i + 1) + ")"; }

std::string where_sub(std::size_t i, std::size_t k) {
  return " (clip " + std::to_string(i + 1) + ", sub-segment " + std::to_string(k + 1) + ")";
}

void check_interval(Violations& v, const TimeInterval& iv, double duration,
                    const std::string& owner, const std::string& where) {
  if (!(iv.start_s < iv.end_s)) {
    v.add("TimeInterval.start_s: start_s must be < end_s in ", owner, where);
  }
  if (iv.start_s < 0.0 || iv.end_s > duration) {
    v.add("TimeInterval.end_s: interval of ", owner, " must lie within [0, duration_s]", where);
  }
}

std::size_t expected_fine_count(const TimeInterval& iv, double fine_fps) {
  std::size_t m = 0;
  while (iv.start_s + static_cast<double>(m) / fine_fps < iv.end_s) ++m;
  return m;
}

std::optional<double> config_number(const Json& cfg, const char* section, const char* key) {
  if (!cfg.is_object()) return std::nullopt;
  const Json* node = &cfg;
  if (section != nullptr) {
    auto it = cfg.find(section);
    if (it == cfg.end() || !it->is_object()) return std::nullopt;
    node = &*it;
  }
  auto it = node->find(key);
  if (it == node->end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

void validate_clip(Violations& v, const VideoDocument& doc, std::size_t i,
                   std::optional<double> sub_min, std::optional<double> fine_fps) {
  const auto& clip = doc.clips[i];
  const auto& tl = clip.timeline;
  const auto w = where_clip(i);
  if (tl.clip_id != static_cast<int>(i + 1)) {
    v.add("TimelineEntry.clip_id: expected ", i + 1, " got ", tl.clip_id, w);
  }
  check_interval(v, tl.interval, doc.duration_s, "TimelineEntry", w);
  if (i + 1 < doc.boundaries.size() &&
      (tl.interval.start_s != doc.boundaries[i] || tl.interval.end_s != doc.boundaries[i + 1])) {
    v.add("TimelineEntry.interval: clip interval must equal [t_{i-1}, t_i)", w);
  }
  if (text::trim(tl.summary).empty()) {
    v.add("TimelineEntry.summary: summary must be non-empty", w);
  }
  if (const auto n = text::word_count(tl.summary); n > kTimelineWordLimit) {
    v.add("TimelineEntry.summary: word-limit exceeded (", n, " > ", kTimelineWordLimit, " words)", w);
  }

  if (clip.subsegments.empty()) {
    v.add("ClipRepresentation.subsegments: at least one sub-segment required", w);
    return;
  }
  const auto& civ = tl.interval;
  double cursor = civ.start_s;
  for (std::size_t k = 0; k < clip.subsegments.size(); ++k) {
    const auto& sub = clip.subsegments[k];
    const auto& cb = sub.coarse;
    const auto ws = where_sub(i, k);
    if (cb.subsegment_id != static_cast<int>(k + 1)) {
      v.add("CoarseBlock.subsegment_id: expected ", k + 1, " got ", cb.subsegment_id, ws);
    }
    check_interval(v, cb.interval, doc.duration_s, "CoarseBlock", ws);
    if (cb.interval.start_s != cursor) {
      v.add("ClipRepresentation.subsegments: sub-segments must tile the clip contiguously", ws);
    }
    cursor = cb.interval.end_s;
    if (cb.interval.start_s < civ.start_s || cb.interval.end_s > civ.end_s) {
      v.add("CoarseBlock.interval: sub-segment must lie inside its clip", ws);
    }
    if (sub_min && civ.duration() >= *sub_min &&
        cb.interval.duration() < *sub_min - kDurationSlack) {
      v.add("ClipRepresentation.subsegments: sub-segment shorter than minimum ", text::fixed6(*sub_min), ws);
    }
    if (cb.actions.empty() != cb.action_sentinel) {
      v.add("CoarseBlock.actions: list may be empty only with the 'no action detected' sentinel", ws);
    }
    if (cb.scenes.empty() != cb.scene_sentinel) {
      v.add("CoarseBlock.scenes: list may be empty only with the 'no action detected' sentinel", ws);
    }
    if (cb.objects.empty() != cb.object_sentinel) {
      v.add("CoarseBlock.objects: list may be empty only with the 'no object detected' sentinel", ws);
    }
    for (const auto& o : cb.objects) {
      if (o.count < 1) v.add("CoarseBlock.objects: count must be >= 1 for '", o.name, "'", ws);
    }

    if (fine_fps && *fine_fps > 0.0) {
      const auto want = expected_fine_count(cb.interval, *fine_fps);
      if (sub.fine.size() != want) {
        v.add("SubSegmentRep.fine: expected M_k = ", want, " fine pairs, got ", sub.fine.size(), ws);
      }
    }
    double prev = -1.0;
    for (std::size_t m = 0; m < sub.fine.size(); ++m) {
      const auto& fp = sub.fine[m];
      if (!cb.interval.contains(fp.frame.timestamp_s)) {
        v.add("FinePair.frame: timestamp ", text::fixed6(fp.frame.timestamp_s),
              " outside its sub-segment", ws);
      }
      if (m > 0 && !(fp.frame.timestamp_s > prev)) {
        v.add("SubSegmentRep.fine: fine timestamps must be strictly increasing", ws);
      }
      prev = fp.frame.timestamp_s;
      if (fp.frame.source.empty()) v.add("FrameRef.source: locator must be non-empty", ws);
      if (fp.spatial.empty() != fp.sentinel) {
        v.add("FinePair.spatial: list may be empty only with the 'no object detected' sentinel", ws);
      }
      for (const auto& s : fp.spatial) {
        if (s.count < 1) v.add("FinePair.spatial: count must be >= 1 for '", s.object_name, "'", ws);
      }
    }
  }
  if (cursor != civ.end_s) {
    v.add("ClipRepresentation.subsegments: union of sub-segments must equal the clip interval", w);
  }
}

}  // namespace

std::vector<std::string> validate_document(const VideoDocument& doc) {
  Violations v;
  if (doc.video_id.empty()) v.add("VideoDocument.video_id: must be non-empty");
  if (!(doc.duration_s > 0.0)) v.add("VideoDocument.duration_s: must be > 0");
  if (!(doc.primary_fps > 0.0)) v.add("VideoDocument.primary_fps: must be > 0");
  const auto& b = doc.boundaries;
  if (b.size() < 2) {
    v.add("VideoDocument.boundaries: need at least t_0 and t_N");
  } else {
    if (b.front() != 0.0) v.add("VideoDocument.boundaries: t_0 must equal 0");
    if (b.back() != doc.duration_s) v.add("VideoDocument.boundaries: t_N must equal duration_s");
    for (std::size_t i = 1; i < b.size(); ++i) {
      if (!(b[i] > b[i - 1])) {
        v.add("VideoDocument.boundaries: must be strictly increasing at index ", i);
      }
    }
  }
  const std::size_t n_expected = b.empty() ? 0 : b.size() - 1;
  if (doc.clips.size() != n_expected) {
    v.add("VideoDocument.clips: |clips| = ", doc.clips.size(), " but |boundaries| - 1 = ", n_expected);
  }
  const auto sub_min = config_number(doc.build_config, "segmentation", "sub_max_s");
  const auto fine_fps = config_number(doc.build_config, nullptr, "fine_fps");
  for (std::size_t i = 0; i < doc.clips.size(); ++i) validate_clip(v, doc, i, sub_min, fine_fps);
  return v.take();
}

// --- JSON mapping ---------------------------------------------------------

namespace {

Json interval_json(const TimeInterval& iv) { return {{"start_s", iv.start_s}, {"end_s", iv.end_s}}; }

TimeInterval interval_from(const Json& j) {
  return {j.at("start_s").get<double>(), j.at("end_s").get<double>()};
}

Json extras_json(const Extras& e) {
  Json j = Json::object();
  for (const auto& [k, val] : e) j[k] = val;
  return j;
}

Extras extras_from(const Json& j) {
  Extras e;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) e[it.key()] = it.value().get<std::string>();
  }
  return e;
}

}  // namespace

Json to_json(const ClipRepresentation& clip) {
  Json j;
  const auto& tl = clip.timeline;
  j["timeline"] = {{"clip_id", tl.clip_id},
                   {"interval", interval_json(tl.interval)},
                   {"summary", tl.summary},
                   {"truncated", tl.truncated},
                   {"frames_used", tl.frames_used}};
  Json subs = Json::array();
  for (const auto& sub : clip.subsegments) {
    const auto& cb = sub.coarse;
    Json actions = Json::array(), scenes = Json::array(), objects = Json::array();
    for (const auto& a : cb.actions) {
      actions.push_back({{"description", a.description}, {"extras", extras_json(a.extras)}});
    }
    for (const auto& s : cb.scenes) {
      scenes.push_back({{"description", s.description},
                        {"setting", s.setting},
                        {"action", s.action},
                        {"extras", extras_json(s.extras)}});
    }
    for (const auto& o : cb.objects) {
      objects.push_back({{"name", o.name},
                         {"count", o.count},
                         {"attributes", o.attributes},
                         {"extras", extras_json(o.extras)}});
    }
    Json fine = Json::array();
    for (const auto& fp : sub.fine) {
      Json spatial = Json::array();
      for (const auto& s : fp.spatial) {
        spatial.push_back({{"object_name", s.object_name},
                           {"count", s.count},
                           {"attributes", s.attributes},
                           {"spatial_relationships", s.spatial_relationships},
                           {"extras", extras_json(s.extras)}});
      }
      fine.push_back({{"frame", {{"timestamp_s", fp.frame.timestamp_s}, {"source", fp.frame.source}}},
                      {"spatial", spatial},
                      {"raw_text", fp.raw_text},
                      {"sentinel", fp.sentinel}});
    }
    subs.push_back({{"coarse",
                     {{"subsegment_id", cb.subsegment_id},
                      {"interval", interval_json(cb.interval)},
                      {"actions", actions},
                      {"scenes", scenes},
                      {"objects", objects},
                      {"action_sentinel", cb.action_sentinel},
                      {"scene_sentinel", cb.scene_sentinel},
                      {"object_sentinel", cb.object_sentinel}}},
                    {"fine", fine}});
  }
  j["subsegments"] = subs;
  return j;
}

ClipRepresentation clip_from_json(const Json& j) {
  ClipRepresentation clip;
  const auto& t = j.at("timeline");
  clip.timeline.clip_id = t.at("clip_id").get<int>();
  clip.timeline.interval = interval_from(t.at("interval"));
  clip.timeline.summary = t.at("summary").get<std::string>();
  clip.timeline.truncated = t.at("truncated").get<bool>();
  clip.timeline.frames_used = t.at("frames_used").get<int>();
  for (const auto& s : j.at("subsegments")) {
    SubSegmentRep sub;
    const auto& c = s.at("coarse");
    sub.coarse.subsegment_id = c.at("subsegment_id").get<int>();
    sub.coarse.interval = interval_from(c.at("interval"));
    sub.coarse.action_sentinel = c.at("action_sentinel").get<bool>();
    sub.coarse.scene_sentinel = c.at("scene_sentinel").get<bool>();
    sub.coarse.object_sentinel = c.at("object_sentinel").get<bool>();
    for (const auto& a : c.at("actions")) {
      sub.coarse.actions.push_back({a.at("description").get<std::string>(), extras_from(a.at("extras"))});
    }
    for (const auto& sc : c.at("scenes")) {
      sub.coarse.scenes.push_back({sc.at("description").get<std::string>(),
                                   sc.at("setting").get<std::string>(),
                                   sc.at("action").get<std::string>(), extras_from(sc.at("extras"))});
    }
    for (const auto& o : c.at("objects")) {
      sub.coarse.objects.push_back({o.at("name").get<std::string>(), o.at("count").get<int>(),
                                    o.at("attributes").get<std::vector<std::string>>(),
                                    extras_from(o.at("extras"))});
    }
    for (const auto& f : s.at("fine")) {
      FinePair fp;
      fp.frame.timestamp_s = f.at("frame").at("timestamp_s").get<double>();
      fp.frame.source = f.at("frame").at("source").get<std::string>();
      fp.raw_text = f.at("raw_text").get<std::string>();
      fp.sentinel = f.at("sentinel").get<bool>();
      for (const auto& r : f.at("spatial")) {
        fp.spatial.push_back({r.at("object_name").get<std::string>(), r.at("count").get<int>(),
                              r.at("attributes").get<std::vector<std::string>>(),
                              r.at("spatial_relationships").get<std::vector<std::string>>(),
                              extras_from(r.at("extras"))});
      }
      sub.fine.push_back(std::move(fp));
    }
    clip.subsegments.push_back(std::move(sub));
  }
  return clip;
}

Json to_json(const VideoDocument& doc) {
  Json clips = Json::array();
  for (const auto& c : doc.clips) clips.push_back(to_json(c));
  Json bounds = Json::array();
  for (double b : doc.boundaries) bounds.push_back(b);
  return {{"schema_version", kDocumentSchemaVersion},
          {"kind", "video_document"},
          {"video_id", doc.video_id},
          {"duration_s", doc.duration_s},
          {"primary_fps", doc.primary_fps},
          {"boundaries", bounds},
          {"clips", clips},
          {"build_config", doc.build_config}};
}

VideoDocument document_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("document: top level must be an object");
  const auto ver = j.find("schema_version");
  if (ver == j.end() || !ver->is_number_integer()) {
    throw SchemaVersionError("document: missing schema_version");
  }
  if (ver->get<int>() != kDocumentSchemaVersion) {
    throw SchemaVersionError("document: unsupported schema_version " + ver->dump() + " (expected " +
                             std::to_string(kDocumentSchemaVersion) + ")");
  }
  VideoDocument doc;
  try {
    doc.video_id = j.at("video_id").get<std::string>();
    doc.duration_s = j.at("duration_s").get<double>();
    doc.primary_fps = j.at("primary_fps").get<double>();
    doc.boundaries = j.at("boundaries").get<std::vector<double>>();
    for (const auto& c : j.at("clips")) doc.clips.push_back(clip_from_json(c));
    doc.build_config = j.value("build_config", Json::object());
  } catch (const Json::exception& e) {
    throw InputError(std::string("document: schema error: ") + e.what());
  }
  return doc;
}

std::string serialize_document(const VideoDocument& doc) { return canonical_dump(to_json(doc)); }

VideoDocument deserialize_document(std::string_view bytes) {
  auto doc = document_from_json(parse_json(bytes, "document"));
  if (auto v = validate_document(doc); !v.empty()) {
    throw ValidationError("document failed validation: " + v.front() +
                          (v.size() > 1 ? " (+" + std::to_string(v.size() - 1) + " more)" : ""));
  }
  return doc;
}

void save_document(const VideoDocument& doc, const std::filesystem::path& path) {
  if (auto v = validate_document(doc); !v.empty()) {
    throw ValidationError("refusing to save invalid document: " + v.front());
  }
  write_file_atomic(path, serialize_document(doc));
}

VideoDocument load_document(const std::filesystem::path& path) {
  return deserialize_document(read_file(path));
}

}  // namespace mmvir
