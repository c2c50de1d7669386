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

// The three-tier video representation document and its persisted form.
//
// A VideoDocument partitions [0, duration) into clips at the detected
// boundaries. Each clip carries one timeline summary and a list of
// sub-segments; each sub-segment carries coarse action/scene/object records
// and a list of fine frame/text pairs sampled at a low rate.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mmvir/canonical_json.hpp"

namespace mmvir {

inline constexpr int kDocumentSchemaVersion = 1;
inline constexpr std::size_t kTimelineWordLimit = 50;

/// Half-open interval [start_s, end_s) in seconds.
struct TimeInterval {
  double start_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - start_s; }
  bool contains(double t) const { return t >= start_s && t < end_s; }
  bool operator==(const TimeInterval&) const = default;
};

struct FrameRef {
  double timestamp_s = 0.0;
  std::string source;
  bool operator==(const FrameRef&) const = default;
};

/// `<video_id>/<timestamp_ms>.jpg`, relative to the frame root.
std::string frame_locator(const std::string& video_id, double timestamp_s);

/// True iff `locator` has the `<video_id>/<digits>.jpg` shape.
bool is_valid_locator(const std::string& locator);

using Extras = std::map<std::string, std::string>;

struct ActionRecord {
  std::string description;
  Extras extras;
  bool operator==(const ActionRecord&) const = default;
};

struct SceneRecord {
  std::string description;
  std::string setting;
  std::string action;
  Extras extras;
  bool operator==(const SceneRecord&) const = default;
};

struct ObjectRecord {
  std::string name;
  int count = 1;
  std::vector<std::string> attributes;
  Extras extras;
  bool operator==(const ObjectRecord&) const = default;
};

struct SpatialRecord {
  std::string object_name;
  int count = 1;
  std::vector<std::string> attributes;
  std::vector<std::string> spatial_relationships;
  Extras extras;
  bool operator==(const SpatialRecord&) const = default;
};

struct TimelineEntry {
  int clip_id = 0;  // 1-based
  TimeInterval interval;
  std::string summary;
  bool truncated = false;
  int frames_used = 0;
  bool operator==(const TimelineEntry&) const = default;
};

struct CoarseBlock {
  int subsegment_id = 0;  // 1-based within its clip
  TimeInterval interval;
  std::vector<ActionRecord> actions;
  std::vector<SceneRecord> scenes;
  std::vector<ObjectRecord> objects;
  bool action_sentinel = false;
  bool scene_sentinel = false;
  bool object_sentinel = false;
  bool operator==(const CoarseBlock&) const = default;
};

struct FinePair {
  FrameRef frame;
  std::vector<SpatialRecord> spatial;
  std::string raw_text;
  bool sentinel = false;
  bool operator==(const FinePair&) const = default;
};

struct SubSegmentRep {
  CoarseBlock coarse;
  std::vector<FinePair> fine;
  bool operator==(const SubSegmentRep&) const = default;
};

struct ClipRepresentation {
  TimelineEntry timeline;
  std::vector<SubSegmentRep> subsegments;
  bool operator==(const ClipRepresentation&) const = default;
};

struct VideoDocument {
  std::string video_id;
  double duration_s = 0.0;
  double primary_fps = 0.5;
  std::vector<double> boundaries;
  std::vector<ClipRepresentation> clips;
  /// Snapshot of the configuration that produced the document. Minimum
  /// sub-segment duration is read from `build_config["segmentation"]["sub_max_s"]`
  /// when present.
  Json build_config = Json::object();
  bool operator==(const VideoDocument&) const = default;
};

/// Returns one human-readable line per broken invariant; empty iff valid.
/// Each line starts with `<Type>.<field>:`.
std::vector<std::string> validate_document(const VideoDocument& doc);

Json to_json(const ClipRepresentation& clip);
ClipRepresentation clip_from_json(const Json& j);
Json to_json(const VideoDocument& doc);
VideoDocument document_from_json(const Json& j);

/// Canonical bytes of `doc` (what save_document writes).
std::string serialize_document(const VideoDocument& doc);

/// Parses and validates. Throws ParseError, SchemaVersionError or
/// ValidationError.
VideoDocument deserialize_document(std::string_view bytes);

/// Refuses to write a document that does not validate.
void save_document(const VideoDocument& doc, const std::filesystem::path& path);
VideoDocument load_document(const std::filesystem::path& path);

}  // namespace mmvir
