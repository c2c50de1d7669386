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

// Tolerant reader for captioner record lists.
//
// Captioners are asked for "a list of dict in JSON format" but reply with
// anything from strict JSON to Python-ish literals with unquoted values
// ([{'object_name': dog, 'number': 2, 'attributes': yellow}]), wrapped in
// prose or code fences. The reader extracts the outermost bracketed list,
// accepts single- or double-quoted or bare keys and values, and maps keys to
// record fields; keys it does not know go to the record's extras.

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mmvir/canonical_json.hpp"
#include "mmvir/document.hpp"

namespace mmvir {

enum class CaptionKind { kAction, kScene, kObject, kSpatial };

struct ParsedCaption {
  bool sentinel = false;
  std::vector<ActionRecord> actions;
  std::vector<SceneRecord> scenes;
  std::vector<ObjectRecord> objects;
  std::vector<SpatialRecord> spatial;

  std::size_t size() const { return actions.size() + scenes.size() + objects.size() + spatial.size(); }
};

/// Throws CaptionParseError (carrying `raw`) when there is neither a usable
/// list nor a sentinel; an explicit empty list is rejected.
ParsedCaption parse_caption_list(std::string_view raw, CaptionKind kind);

/// Case-insensitive search for either sentinel string.
bool contains_sentinel(std::string_view raw);

/// The list-extraction step alone: the outermost bracketed list as JSON, or
/// nullopt if none can be read.
std::optional<Json> parse_loose_list(std::string_view raw);

}  // namespace mmvir
