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

#include "mmvir/prompts.hpp"

#include <array>

namespace mmvir::prompts {
namespace {

constexpr std::string_view kTimeline =
    R"PROMPT(Your task is to analyze the given video 
frame sequence extracted from a long video 
for a detailed video understanding exercise, 
focusing on the **motion**, to identify and 
describe all of the **actions** appear in the 
images, and **where** whey take place by **who**, 
as well as the corresponding objectives.
YOU ARE ALLOWED TO USE A MAXIMUM OF 50 words for 
this description. Please only return the
description.)PROMPT";

constexpr std::string_view kAction =
    R"PROMPT(Your task is to analyze video frames extracted
from a video for a detailed understanding.
I will provide a frame sequence with each frame 
spaced every 2 seconds. Examine these frames 
closely and generate a comprehensive caption 
by strictly following:
List the sequence of all **actions** and the
corresponding **objects** in the order they 
occur in the given frames. 
YOU ARE ALLOWED TO USE A MAXIMUM OF 200 words for 
this description. 
PLEASE Strictly return your results by a list of 
dict in JSON format, following the example below: 
[{'action description': cooking the sausages 
and eggs}, {'action description': cleaning up 
dishes}]
Please do not return a empty list as the result. 
If there is no action appears in the given frames, 
please return the string: 'no action detected'.)PROMPT";

constexpr std::string_view kScene =
    R"PROMPT(Your task is to analyze video frames extracted 
from a video for a detailed understanding. 
I will provide a frame sequence with each frame 
spaced every 2 seconds. Examine these frames 
closely and generate a comprehensive caption by 
strictly following: 
List all of the actions and their corresponding 
**settings** that appear in the given frames. 
YOU ARE ALLOWED TO USE A MAXIMUM OF 200 words for 
this description. 
PLEASE Strictly return your results by a list of 
dict in JSON format, following the example below: 
[{'description': The man opens a cabinet in the 
kitchen, 'setting': Kitchen, 'action': Opening 
a cabinet}, {'description': A person is watering 
plants in a garden, 'setting': Garden, 'action': 
watering}]
Please do not return a empty list as the result. 
If there is no action appears in the given frames, 
please return the string: 'no action detected'.)PROMPT";

constexpr std::string_view kObject =
    R"PROMPT(Your task is to analyze video frames extracted 
from a video for a detailed understanding. 
I will provide a frame sequence with each frame 
spaced every 2 seconds. Examine these frames 
closely and generate a comprehensive caption 
by strictly following: 
List the key objects and the characters that 
appear in the given frames, along with their 
attributes if applicable (e.g., color, shape, 
texture), each attribute is separated with a 
comma. 
YOU ARE ALLOWED TO USE A MAXIMUM OF 200 words for 
this description. 
PLEASE Strictly return your results by a list of 
dict in JSON format, following the example below: 
[{'object_name': man, 'number': 1}, 
{'object_name': dog, 'number': 2, 'attributes': 
yellow}]
Please do not return a empty list as the result. 
If there is no object appears in the given frames, 
please return the string: 'no object detected'.)PROMPT";

constexpr std::string_view kSpatial =
    R"PROMPT(Your task is to analyze the given image a 
detailed understanding. 
Please examine it closely and generate a 
comprehensive caption by strictly following:
Observe the key objects in the image, and state 
the spatial realtionships between them. List all 
of key objects that appear in the image, along 
with their relationships with others if 
applicable, each relationship is separated with 
a comma. 
YOU ARE ALLOWED TO USE A MAXIMUM OF 200 words for 
this description. 
PLEASE Strictly return your results by a list of 
dict in JSON format, following the example below:
[{'object_name': table, 'number': 1}, 
{'object_name': kettle, 'number': 1, 
'attributes': gray, 'spatial_relationship': 
[on the table, right of the kitchen]}] 
Please do not return a empty list as the result. 
If there is no object appears in the given frames, 
please return the string: 'no object detected'.)PROMPT";

constexpr std::array<PromptTemplate, 5> kTemplates = {{
    {PromptId::kTimeline, "timeline", kTimeline, ExpectedForm::kFreeText, 50},
    {PromptId::kAction, "action", kAction, ExpectedForm::kRecordList, 200},
    {PromptId::kScene, "scene", kScene, ExpectedForm::kRecordList, 200},
    {PromptId::kObject, "object", kObject, ExpectedForm::kRecordList, 200},
    {PromptId::kSpatial, "spatial", kSpatial, ExpectedForm::kRecordList, 200},
}};

}  // namespace

const PromptTemplate& get(PromptId id) { return kTemplates[static_cast<std::size_t>(id)]; }

std::optional<PromptId> from_name(std::string_view name) {
  for (const auto& t : kTemplates) {
    if (t.name == name) return t.id;
  }
  return std::nullopt;
}

std::optional<PromptId> identify(std::string_view prompt) {
  for (const auto& t : kTemplates) {
    if (prompt.substr(0, t.text.size()) == t.text) return t.id;
  }
  return std::nullopt;
}

std::string timeline_retry_prompt() {
  return std::string(kTimeline) +
         "\nYour previous answer was too long. Again: YOU ARE ALLOWED TO USE A MAXIMUM OF 50 "
         "words for this description.";
}

}  // namespace mmvir::prompts
