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

#include <algorithm>
#include <fstream>

#include "mmvir/error.hpp"
#include "test_util.hpp"

namespace mmvir {
namespace {

using testing::make_valid_doc;
using testing::TempDir;

bool any_starts_with(const std::vector<std::string>& v, const std::string& prefix) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
}

TEST(ValidateDocument, TwoValidClipsHaveNoViolations) {
  const auto doc = make_valid_doc({0, 300, 900});
  EXPECT_TRUE(validate_document(doc).empty());
  EXPECT_EQ(doc.clips.size(), 2u);
}

TEST(ValidateDocument, SixtyOneWordSummaryViolatesWordLimit) {
  auto doc = make_valid_doc({0, 300, 900});
  std::string s;
  for (int i = 0; i < 61; ++i) s += "word ";
  doc.clips[0].timeline.summary = s;
  const auto v = validate_document(doc);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("TimelineEntry.summary"), std::string::npos);
  EXPECT_NE(v[0].find("word-limit"), std::string::npos);
}

TEST(ValidateDocument, FiftyWordsIsAllowed) {
  auto doc = make_valid_doc({0, 300});
  std::string s;
  for (int i = 0; i < 50; ++i) s += "w" + std::to_string(i) + " ";
  doc.clips[0].timeline.summary = s;
  EXPECT_TRUE(validate_document(doc).empty());
}

TEST(ValidateDocument, NonZeroFirstBoundary) {
  auto doc = make_valid_doc({0, 300, 900});
  doc.boundaries[0] = 5;
  const auto v = validate_document(doc);
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const std::string& s) {
    return s.find("t_0 must equal 0") != std::string::npos;
  }));
}

TEST(ValidateDocument, ClipCountMustMatchBoundaries) {
  auto doc = make_valid_doc({0, 300, 900});
  doc.clips.pop_back();
  EXPECT_TRUE(any_starts_with(validate_document(doc), "VideoDocument.clips"));
}

TEST(ValidateDocument, LastBoundaryMustEqualDuration) {
  auto doc = make_valid_doc({0, 300, 900});
  doc.duration_s = 1000;
  EXPECT_TRUE(any_starts_with(validate_document(doc), "VideoDocument.boundaries"));
}

TEST(ValidateDocument, NonIncreasingBoundaries) {
  auto doc = make_valid_doc({0, 300, 900});
  doc.boundaries = {0, 300, 300, 900};
  EXPECT_TRUE(any_starts_with(validate_document(doc), "VideoDocument.boundaries"));
}

TEST(ValidateDocument, EmptySummary) {
  auto doc = make_valid_doc({0, 300});
  doc.clips[0].timeline.summary = "   ";
  EXPECT_TRUE(any_starts_with(validate_document(doc), "TimelineEntry.summary"));
}

TEST(ValidateDocument, GapBetweenSubSegments) {
  auto doc = make_valid_doc({0, 300});
  doc.clips[0].subsegments[1].coarse.interval.start_s += 1.0;
  EXPECT_TRUE(any_starts_with(validate_document(doc), "ClipRepresentation.subsegments"));
}

TEST(ValidateDocument, EmptyListWithoutSentinel) {
  auto doc = make_valid_doc({0, 300});
  doc.clips[0].subsegments[0].coarse.actions.clear();
  EXPECT_TRUE(any_starts_with(validate_document(doc), "CoarseBlock.actions"));
  doc.clips[0].subsegments[0].coarse.action_sentinel = true;
  EXPECT_TRUE(validate_document(doc).empty());
}

TEST(ValidateDocument, SentinelWithRecordsIsInconsistent) {
  auto doc = make_valid_doc({0, 300});
  doc.clips[0].subsegments[0].coarse.object_sentinel = true;
  EXPECT_TRUE(any_starts_with(validate_document(doc), "CoarseBlock.objects"));
}

TEST(ValidateDocument, ObjectCountAtLeastOne) {
  auto doc = make_valid_doc({0, 300});
  doc.clips[0].subsegments[0].coarse.objects[0].count = 0;
  EXPECT_TRUE(any_starts_with(validate_document(doc), "CoarseBlock.objects"));
}

TEST(ValidateDocument, FineCountMustMatchRate) {
  auto doc = make_valid_doc({0, 300});
  doc.clips[0].subsegments[0].fine.pop_back();
  EXPECT_TRUE(any_starts_with(validate_document(doc), "SubSegmentRep.fine"));
}

TEST(ValidateDocument, FineTimestampOutsideSubSegment) {
  auto doc = make_valid_doc({0, 300});
  doc.clips[0].subsegments[0].fine.back().frame.timestamp_s = 150.0;
  EXPECT_TRUE(any_starts_with(validate_document(doc), "FinePair.frame"));
}

TEST(ValidateDocument, SubSegmentShorterThanMinimum) {
  auto doc = make_valid_doc({0, 300});
  auto& subs = doc.clips[0].subsegments;
  ASSERT_EQ(subs.size(), 3u);
  subs[0].coarse.interval.end_s = 50;
  subs[1].coarse.interval.start_s = 50;
  const auto v = validate_document(doc);
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const std::string& s) {
    return s.find("shorter than minimum") != std::string::npos;
  }));
}

TEST(Locator, ShapeAndRoundedMilliseconds) {
  EXPECT_EQ(frame_locator("v1", 12.0), "v1/12000.jpg");
  EXPECT_EQ(frame_locator("v1", 0.0015), "v1/2.jpg");
  EXPECT_TRUE(is_valid_locator("v1/12000.jpg"));
  EXPECT_FALSE(is_valid_locator("v1/12a.jpg"));
  EXPECT_FALSE(is_valid_locator("12000.jpg"));
  EXPECT_FALSE(is_valid_locator("v1/12000.png"));
}

TEST(Persistence, RoundTripIsIdentity) {
  TempDir tmp;
  const auto doc = make_valid_doc({0, 300, 700, 1000});
  save_document(doc, tmp / "d.json");
  EXPECT_EQ(load_document(tmp / "d.json"), doc);
}

TEST(Persistence, TwoSavesAreByteIdentical) {
  TempDir tmp;
  const auto doc = make_valid_doc({0, 350.5, 1000});
  save_document(doc, tmp / "a.json");
  save_document(doc, tmp / "b.json");
  EXPECT_EQ(read_file(tmp / "a.json"), read_file(tmp / "b.json"));
  EXPECT_EQ(serialize_document(deserialize_document(serialize_document(doc))), serialize_document(doc));
}

TEST(Persistence, UnknownSchemaVersion) {
  auto j = to_json(make_valid_doc({0, 300}));
  j["schema_version"] = 99;
  EXPECT_THROW(deserialize_document(canonical_dump(j)), SchemaVersionError);
}

TEST(Persistence, TruncatedFileNamesByteOffset) {
  const auto bytes = serialize_document(make_valid_doc({0, 300, 900}));
  const auto half = bytes.substr(0, bytes.size() / 2);
  try {
    deserialize_document(half);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.offset(), 0u);
    EXPECT_LE(e.offset(), half.size() + 1);  // end of input
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(Persistence, SaveRefusesInvalidDocument) {
  TempDir tmp;
  auto doc = make_valid_doc({0, 300});
  doc.boundaries[0] = 5;
  EXPECT_THROW(save_document(doc, tmp / "bad.json"), ValidationError);
  EXPECT_FALSE(std::filesystem::exists(tmp / "bad.json"));
}

TEST(Persistence, LoadValidates) {
  auto j = to_json(make_valid_doc({0, 300}));
  j["clips"][0]["timeline"]["summary"] = "";
  EXPECT_THROW(deserialize_document(canonical_dump(j)), ValidationError);
}

TEST(Persistence, MissingFileIsInputError) {
  EXPECT_THROW(load_document("/nonexistent/doc.json"), InputError);
}

TEST(Persistence, ExtrasAndSentinelsSurvive) {
  auto doc = make_valid_doc({0, 300});
  auto& c = doc.clips[0].subsegments[0].coarse;
  c.actions.clear();
  c.action_sentinel = true;
  c.objects[0].extras["colour"] = "red";
  doc.clips[0].timeline.truncated = true;
  EXPECT_EQ(deserialize_document(serialize_document(doc)), doc);
}

}  // namespace
}  // namespace mmvir
