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

#include <gtest/gtest.h>

#include "mmvir/caption_parse.hpp"
#include "mmvir/error.hpp"

namespace mmvir {
namespace {

TEST(CaptionParse, PythonishObjectList) {
  const auto p = parse_caption_list(
      "[{'object_name': man, 'number': 1}, {'object_name': dog, 'number': 2, 'attributes': yellow}]",
      CaptionKind::kObject);
  ASSERT_EQ(p.objects.size(), 2u);
  EXPECT_EQ(p.objects[0].name, "man");
  EXPECT_EQ(p.objects[0].count, 1);
  EXPECT_EQ(p.objects[1].name, "dog");
  EXPECT_EQ(p.objects[1].count, 2);
  EXPECT_EQ(p.objects[1].attributes, std::vector<std::string>{"yellow"});
  EXPECT_FALSE(p.sentinel);
}

TEST(CaptionParse, ActionListWithSpacesInKeysAndValues) {
  const auto p = parse_caption_list(
      "[{'action description': cooking the sausages and eggs}, {'action description': cleaning up dishes}]",
      CaptionKind::kAction);
  ASSERT_EQ(p.actions.size(), 2u);
  EXPECT_EQ(p.actions[0].description, "cooking the sausages and eggs");
  EXPECT_EQ(p.actions[1].description, "cleaning up dishes");
}

TEST(CaptionParse, SceneListFromTemplateExample) {
  const auto p = parse_caption_list(
      "[{'description': The man opens a cabinet in the kitchen, 'setting': Kitchen, 'action': Opening a "
      "cabinet}, {'description': A person is watering plants in a garden, 'setting': Garden, 'action': watering}]",
      CaptionKind::kScene);
  ASSERT_EQ(p.scenes.size(), 2u);
  EXPECT_EQ(p.scenes[0].setting, "Kitchen");
  EXPECT_EQ(p.scenes[0].action, "Opening a cabinet");
  EXPECT_EQ(p.scenes[1].description, "A person is watering plants in a garden");
}

TEST(CaptionParse, SpatialRelationshipsList) {
  const auto p = parse_caption_list(
      "[{'object_name': table, 'number': 1}, {'object_name': kettle, 'number': 1, 'attributes': gray, "
      "'spatial_relationship': [on the table, right of the kitchen]}]",
      CaptionKind::kSpatial);
  ASSERT_EQ(p.spatial.size(), 2u);
  EXPECT_EQ(p.spatial[1].object_name, "kettle");
  EXPECT_EQ(p.spatial[1].attributes, std::vector<std::string>{"gray"});
  EXPECT_EQ(p.spatial[1].spatial_relationships,
            (std::vector<std::string>{"on the table", "right of the kitchen"}));
}

TEST(CaptionParse, StrictJsonInsideProseAndFences) {
  const auto p = parse_caption_list(
      "Here you go:\n```json\n[{\"object_name\": \"cup\", \"number\": 3}]\n```\nHope this helps.",
      CaptionKind::kObject);
  ASSERT_EQ(p.objects.size(), 1u);
  EXPECT_EQ(p.objects[0].name, "cup");
  EXPECT_EQ(p.objects[0].count, 3);
}

TEST(CaptionParse, SentinelInAnyCase) {
  for (const char* raw : {"no action detected", "NO ACTION DETECTED.", "'no action detected'",
                          "Result: No Object Detected"}) {
    const auto p = parse_caption_list(raw, CaptionKind::kAction);
    EXPECT_TRUE(p.sentinel) << raw;
    EXPECT_EQ(p.size(), 0u);
  }
}

TEST(CaptionParse, EmptyListIsRejected) {
  try {
    parse_caption_list("[]", CaptionKind::kObject);
    FAIL();
  } catch (const CaptionParseError& e) {
    EXPECT_EQ(e.raw(), "[]");
  }
}

TEST(CaptionParse, UnknownKeysGoToExtras) {
  const auto p = parse_caption_list("[{'object_name': lamp, 'colour_temp': warm}]", CaptionKind::kObject);
  ASSERT_EQ(p.objects.size(), 1u);
  EXPECT_EQ(p.objects[0].extras.at("colour_temp"), "warm");
}

TEST(CaptionParse, BareStringsFillThePrimaryField) {
  const auto p = parse_caption_list("['walking', 'sitting down']", CaptionKind::kAction);
  ASSERT_EQ(p.actions.size(), 2u);
  EXPECT_EQ(p.actions[1].description, "sitting down");
}

// Malformed replies must either parse to something usable or raise
// CaptionParseError carrying the raw text; nothing else may escape.
TEST(CaptionParse, MalformedVariantsFailCleanly) {
  const std::vector<std::string> variants = {
      "",
      "   ",
      "I cannot see anything.",
      "[",
      "]",
      "[{",
      "[{'object_name': }",
      "[{'object_name': dog, 'number': }]",
      "{'object_name': dog}",
      "[[[[",
      "[{'a': [1, 2, [3]}]",
      "```json\n```",
      "[{'object_name': 'unterminated}]",
      "[{\"object_name\": \"x\", }]",
      "[{'number': 2}]",
      "[null, null]",
      "[1, 2, 3]",
      "[{'object_name': dog, 'number': two}]",
      "][",
      "[{}, {}]",
  };
  ASSERT_EQ(variants.size(), 20u);
  for (const auto& v : variants) {
    try {
      const auto p = parse_caption_list(v, CaptionKind::kObject);
      EXPECT_GT(p.size(), 0u) << v;
    } catch (const CaptionParseError& e) {
      EXPECT_EQ(e.raw(), v);
    } catch (const std::exception& e) {
      ADD_FAILURE() << "unexpected exception for '" << v << "': " << e.what();
    }
  }
}

TEST(CaptionParse, NonNumericCountIsKeptAsExtra) {
  const auto p = parse_caption_list("[{'object_name': dog, 'number': several}]", CaptionKind::kObject);
  ASSERT_EQ(p.objects.size(), 1u);
  EXPECT_EQ(p.objects[0].count, 1);
  EXPECT_FALSE(p.objects[0].extras.empty());
}

TEST(CaptionParse, LooseListAlone) {
  const auto j = parse_loose_list("noise [ 'a', \"b\", c d ] trailing");
  ASSERT_TRUE(j.has_value());
  EXPECT_EQ(*j, Json::array({"a", "b", "c d"}));
  EXPECT_FALSE(parse_loose_list("no brackets here").has_value());
}

}  // namespace
}  // namespace mmvir
