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

#include "mmvir/config.hpp"
#include "mmvir/error.hpp"

namespace mmvir::config {
namespace {

TEST(Config, EnvNames) {
  EXPECT_EQ(env_name("min_clip_s"), "MMVIR_MIN_CLIP_S");
  EXPECT_EQ(env_name("k"), "MMVIR_K");
}

TEST(Config, DefaultsProduceDefaultRunConfig) {
  const auto c = load_run_config({}, {}, {});
  EXPECT_EQ(c.k, 10u);
  EXPECT_EQ(c.build.segmentation.min_clip_s, 300);
  EXPECT_EQ(c.build.fine_fps, 0.05);
  EXPECT_TRUE(c.gateway.offline);
  EXPECT_EQ(c.mode, retrieval::ExpandMode::kHybrid);
}

// Every presence pattern across the three layers: the highest present wins.
TEST(Config, PrecedenceMatrix) {
  for (int mask = 0; mask < 8; ++mask) {
    Layer file, env, flags;
    std::string want = "300";
    Source src = Source::kDefault;
    if (mask & 1) {
      file["min_clip_s"] = "101";
      want = "101";
      src = Source::kFile;
    }
    if (mask & 2) {
      env["min_clip_s"] = "202";
      want = "202";
      src = Source::kEnv;
    }
    if (mask & 4) {
      flags["min_clip_s"] = "303";
      want = "303";
      src = Source::kFlag;
    }
    const auto r = resolve(file, env, flags);
    EXPECT_EQ(r.at("min_clip_s").value, want) << mask;
    EXPECT_EQ(r.at("min_clip_s").source, src) << mask;
    EXPECT_EQ(RunConfig::from_resolved(r).build.segmentation.min_clip_s, std::stod(want));
  }
}

TEST(Config, EnvLayerReadsOnlyKnownKeys) {
  const auto env = env_layer([](const char* k) -> const char* {
    if (std::string(k) == "MMVIR_K") return "7";
    if (std::string(k) == "MMVIR_BOGUS") return "x";
    return nullptr;
  });
  EXPECT_EQ(env, (Layer{{"k", "7"}}));
}

TEST(Config, FileLayerTypes) {
  const auto l = file_layer(Json{{"k", 3}, {"fine_fps", 0.1}, {"offline", false}, {"method", "kts"}});
  EXPECT_EQ(l.at("k"), "3");
  EXPECT_EQ(l.at("offline"), "false");
  EXPECT_EQ(std::stod(l.at("fine_fps")), 0.1);
  EXPECT_THROW(file_layer(Json::array()), InputError);
  EXPECT_THROW(file_layer(Json{{"k", Json::array()}}), InputError);
}

TEST(Config, UnknownKeyIsRejected) { EXPECT_THROW(resolve({{"nope", "1"}}, {}, {}), InputError); }

TEST(Config, BadValueNamesKeyAndSource) {
  try {
    load_run_config({}, {{"min_clip_s", "abc"}}, {});
    FAIL();
  } catch (const InputError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("min_clip_s"), std::string::npos) << w;
    EXPECT_NE(w.find("env"), std::string::npos) << w;
  }
  EXPECT_THROW(load_run_config({}, {}, {{"k", "0"}}), InputError);
  EXPECT_THROW(load_run_config({}, {}, {{"mode", "audio"}}), InputError);
  EXPECT_THROW(load_run_config({}, {}, {{"offline", "maybe"}}), InputError);
  EXPECT_THROW(load_run_config({}, {}, {{"protocol", "grpc"}}), InputError);
}

TEST(Config, UrlsImplyLiveUnlessOfflineIsExplicit) {
  const Layer urls = {{"embed_url", "http://h/e"}, {"caption_url", "http://h/c"}, {"answer_url", "http://h/a"}};
  EXPECT_FALSE(load_run_config(urls, {}, {}).gateway.offline);
  auto explicit_offline = urls;
  explicit_offline["offline"] = "true";
  EXPECT_THROW(load_run_config(explicit_offline, {}, {}), InputError);
  EXPECT_THROW(load_run_config({{"embed_url", "http://h/e"}}, {}, {}), InputError);
}

TEST(Config, SnapshotIsStableAndOmitsParallelism) {
  const auto a = load_run_config({}, {}, {{"caption_parallelism", "1"}}).snapshot();
  const auto b = load_run_config({}, {}, {{"caption_parallelism", "9"}}).snapshot();
  EXPECT_EQ(a, b);
  const auto c = load_run_config({}, {}, {{"k", "3"}}).snapshot();
  EXPECT_NE(a, c);
}

}  // namespace
}  // namespace mmvir::config
