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

#include "mmvir/error.hpp"
#include "mmvir/synth.hpp"
#include "test_util.hpp"

namespace mmvir {
namespace {

using testing::make_series;
using testing::TempDir;

TEST(Series, DurationIsOnePeriodPastLastSample) {
  const auto s = make_series({{1, 0}, {0, 1}, {1, 1}});
  EXPECT_DOUBLE_EQ(s.duration(), 6.0);
}

TEST(Series, ValidateRejectsShortOrUnnormalized) {
  auto s = make_series({{1, 0}, {0, 1}});
  EXPECT_NO_THROW(s.validate());
  auto bad = s;
  bad.vectors[0] = 2.0;
  EXPECT_THROW(bad.validate(), InputError);
  auto one = s;
  one.timestamps.resize(1);
  one.vectors.resize(2);
  EXPECT_THROW(one.validate(), InputError);
  auto order = s;
  order.timestamps = {2.0, 1.0};
  EXPECT_THROW(order.validate(), InputError);
}

TEST(Series, NormalizeRejectsZeroRow) {
  FrameEmbeddingSeries s;
  s.dim = 2;
  s.timestamps = {0, 2};
  s.vectors = {0, 0, 1, 0};
  EXPECT_THROW(normalize_rows(s), InputError);
}

TEST(Series, TextRoundTrip) {
  const auto planted = synth::random_piecewise_series(3, 40, 2, 10, 0.01, 8);
  const auto text = series_to_text(planted.series);
  const auto back = parse_series_text(text);
  EXPECT_EQ(back.video_id, planted.series.video_id);
  EXPECT_EQ(back.size(), planted.series.size());
  EXPECT_EQ(back.dim, planted.series.dim);
  for (std::size_t i = 0; i < back.vectors.size(); ++i) EXPECT_NEAR(back.vectors[i], planted.series.vectors[i], 1e-9);
}

TEST(Series, BinaryRoundTripWithinFloatPrecision) {
  const auto planted = synth::random_piecewise_series(4, 30, 3, 5, 0.01, 16);
  const auto bin = series_to_binary(planted.series);
  EXPECT_EQ(bin.substr(0, 4), "MVES");
  const auto back = parse_series_binary(bin);
  EXPECT_EQ(back.timestamps, planted.series.timestamps);
  for (std::size_t i = 0; i < back.vectors.size(); ++i) EXPECT_NEAR(back.vectors[i], planted.series.vectors[i], 1e-6);
}

TEST(Series, LoaderSniffsFormat) {
  TempDir tmp;
  const auto s = make_series({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  write_file_atomic(tmp / "a.txt", series_to_text(s));
  write_file_atomic(tmp / "a.bin", series_to_binary(s));
  EXPECT_EQ(load_series(tmp / "a.txt").size(), 3u);
  EXPECT_EQ(load_series(tmp / "a.bin").size(), 3u);
}

TEST(Series, TextParserAcceptsCommentsAndRenormalizes) {
  auto s = parse_series_text("# hello\n2 2 0.5 clip\n0 3 4\n2 0 2\n");
  normalize_rows(s);
  EXPECT_EQ(s.video_id, "clip");
  EXPECT_NEAR(s.vectors[0], 0.6, 1e-12);
  EXPECT_NEAR(s.vectors[1], 0.8, 1e-12);
}

TEST(Series, MalformedInputs) {
  EXPECT_THROW(parse_series_text(""), InputError);
  EXPECT_THROW(parse_series_text("2 2 0.5 v\n0 1 0\n"), InputError);           // missing row
  EXPECT_THROW(parse_series_text("2 2 0.5 v\n0 1 0\n2 1 x\n"), InputError);    // bad number
  EXPECT_THROW(parse_series_binary("MVES"), InputError);                       // truncated
  auto bin = series_to_binary(make_series({{1, 0}, {0, 1}}));
  bin[4] = 9;
  EXPECT_THROW(parse_series_binary(bin), InputError);                          // version
}

}  // namespace
}  // namespace mmvir
