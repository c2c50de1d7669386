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

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace mmvir::prompts {

enum class PromptId { kTimeline, kAction, kScene, kObject, kSpatial };

inline constexpr std::array<PromptId, 5> kAllPrompts = {
    PromptId::kTimeline, PromptId::kAction, PromptId::kScene, PromptId::kObject, PromptId::kSpatial};

enum class ExpectedForm { kFreeText, kRecordList };

struct PromptTemplate {
  PromptId id;
  std::string_view name;  // "timeline", "action", ...
  std::string_view text;  // exact captioner instruction
  ExpectedForm form;
  std::size_t word_limit;
};

const PromptTemplate& get(PromptId id);
std::optional<PromptId> from_name(std::string_view name);

/// Recognises a prompt produced by this module (exact template, or template
/// followed by a restated-limit reminder).
std::optional<PromptId> identify(std::string_view prompt);

inline constexpr std::string_view kNoActionSentinel = "no action detected";
inline constexpr std::string_view kNoObjectSentinel = "no object detected";

/// Appended on the single retry issued for an over-long timeline summary.
std::string timeline_retry_prompt();

}  // namespace mmvir::prompts
