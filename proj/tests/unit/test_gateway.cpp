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
#include <httplib.h>

#include <cmath>
#include <thread>

#include "mmvir/document.hpp"
#include "mmvir/error.hpp"
#include "mmvir/gateway.hpp"
#include "mmvir/prompts.hpp"
#include "test_util.hpp"

namespace mmvir::gw {
namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(MockGateway, EmbeddingsAreUnitAndDeterministic) {
  auto g = Gateway::offline();
  const auto a = g->embed({EmbedKind::kText, "a man cooking eggs", "", ""});
  const auto b = g->embed({EmbedKind::kText, "a man cooking eggs", "", ""});
  EXPECT_EQ(a.vector, b.vector);
  EXPECT_EQ(a.dim, 128u);
  EXPECT_NEAR(norm(a.vector), 1.0, 1e-12);
}

TEST(MockGateway, BagOfWordsIgnoresOrder) {
  auto g = Gateway::offline();
  EXPECT_EQ(g->embed({EmbedKind::kText, "a b", "", ""}).vector, g->embed({EmbedKind::kText, "b a", "", ""}).vector);
  EXPECT_NE(g->embed({EmbedKind::kText, "a b", "", ""}).vector, g->embed({EmbedKind::kText, "a c", "", ""}).vector);
}

TEST(MockGateway, EmptyEmbedPayloadRejected) {
  auto g = Gateway::offline();
  EXPECT_THROW(g->embed({EmbedKind::kText, "  ", "", ""}), InputError);
}

TEST(MockGateway, AnswerPicksSelfMatchingOption) {
  auto g = Gateway::offline();
  AnswerRequest r;
  r.context = {ContextBlock::text("dog running in the park")};
  r.question = "What is happening?";
  r.options = {"cat sleeping on a mat", "dog running in the park", "bird singing"};
  EXPECT_EQ(g->answer(r).text, "B");
}

TEST(MockGateway, AnswerPreconditions) {
  GatewayConfig cfg;
  cfg.max_context_blocks = 10000;
  auto g = Gateway::offline(cfg);
  AnswerRequest r;
  r.question = "q";
  r.context.assign(10000, ContextBlock::text("x"));
  EXPECT_NO_THROW(g->answer(r));
  r.context.push_back(ContextBlock::text("x"));
  EXPECT_THROW(g->answer(r), InputError);
  r.context.clear();
  r.question = "   ";
  EXPECT_THROW(g->answer(r), InputError);
}

TEST(MockGateway, CaptionsParseForEveryPrompt) {
  auto g = Gateway::offline();
  for (auto id : prompts::kAllPrompts) {
    CaptionRequest r;
    r.frames = {frame_locator("v1", 10), frame_locator("v1", 12)};
    r.prompt = std::string(prompts::get(id).text);
    const auto a = g->caption(r);
    const auto b = g->caption(r);
    EXPECT_FALSE(a.text.empty());
    EXPECT_EQ(a.text, b.text);
    EXPECT_EQ(a.text.find_last_not_of(" \t\r\n"), a.text.size() - 1);
  }
}

TEST(MockGateway, CaptionNeedsFrames) {
  auto g = Gateway::offline();
  CaptionRequest r;
  r.prompt = std::string(prompts::get(prompts::PromptId::kTimeline).text);
  EXPECT_THROW(g->caption(r), InputError);
  r.frames = {"not a locator"};
  EXPECT_THROW(g->caption(r), InputError);
}

TEST(MockGateway, CallLogCountsByTag) {
  auto g = Gateway::offline();
  g->embed({EmbedKind::kText, "x", "", "index"});
  g->embed({EmbedKind::kText, "y", "", "query"});
  EXPECT_EQ(g->log().count(Capability::kEmbed), 2u);
  EXPECT_EQ(g->log().count(Capability::kEmbed, "index"), 1u);
  g->log().clear();
  EXPECT_EQ(g->log().count(Capability::kEmbed), 0u);
}

TEST(GatewayConfig, Validation) {
  GatewayConfig c;
  EXPECT_NO_THROW(c.validate());
  c.embed_url = "http://x/e";
  EXPECT_THROW(c.validate(), InputError);
  c.offline = false;
  EXPECT_THROW(c.validate(), InputError);
  c.caption_url = "http://x/c";
  c.answer_url = "http://x/a";
  EXPECT_NO_THROW(c.validate());
  c.max_retries = -1;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(OptionLabel, Letters) {
  EXPECT_EQ(option_label(0), "A");
  EXPECT_EQ(option_label(3), "D");
}

// Answers `failures` requests with `status`, then succeeds, echoing the
// correlation id the envelope carries.
class FlakyTransport final : public Transport {
 public:
  FlakyTransport(int failures, int status) : failures_(failures), status_(status) {}
  HttpResponse post(const std::string&, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>&, double) override {
    ++calls;
    if (calls <= failures_) {
      if (status_ == 0) throw TransportError("connection reset");
      return {status_, "{}"};
    }
    const auto req = Json::parse(body);
    Json result = {{"vector", {0.0, 3.0, 4.0}}};
    return {200, Json({{"ok", true}, {"request_id", req.at("request_id")}, {"result", result}}).dump()};
  }
  int calls = 0;

 private:
  int failures_;
  int status_;
};

GatewayConfig live_config() {
  GatewayConfig c;
  c.offline = false;
  c.embed_url = "http://127.0.0.1:1/embed";
  c.caption_url = "http://127.0.0.1:1/caption";
  c.answer_url = "http://127.0.0.1:1/answer";
  c.embed_dim = 3;
  c.backoff_base_s = 0.5;
  return c;
}

TEST(RemoteGateway, RetriesRetryableFailuresWithBackoff) {
  for (int status : {429, 500, 503, 0}) {
    for (int failures = 0; failures <= 6; ++failures) {
      for (int max_retries = 0; max_retries <= 4; ++max_retries) {
        auto cfg = live_config();
        cfg.max_retries = max_retries;
        auto t = std::make_shared<FlakyTransport>(failures, status);
        std::vector<double> waits;
        auto g = Gateway::remote(cfg, t, [&](double s) { waits.push_back(s); });
        const bool should_succeed = failures <= max_retries;
        if (should_succeed) {
          const auto r = g->embed({EmbedKind::kText, "hello", "", ""});
          EXPECT_NEAR(r.vector[1], 0.6, 1e-12);
          EXPECT_NEAR(r.vector[2], 0.8, 1e-12);
        } else {
          EXPECT_THROW(g->embed({EmbedKind::kText, "hello", "", ""}), GatewayError);
        }
        EXPECT_EQ(t->calls, std::min(failures + 1, max_retries + 1));
        ASSERT_EQ(waits.size(), static_cast<std::size_t>(t->calls - 1));
        for (std::size_t i = 0; i < waits.size(); ++i) EXPECT_DOUBLE_EQ(waits[i], 0.5 * std::pow(2.0, i));
      }
    }
  }
}

TEST(RemoteGateway, NonRetryableStatusFailsImmediately) {
  auto t = std::make_shared<FlakyTransport>(5, 400);
  auto g = Gateway::remote(live_config(), t, [](double) {});
  EXPECT_THROW(g->embed({EmbedKind::kText, "x", "", ""}), GatewayError);
  EXPECT_EQ(t->calls, 1);
}

TEST(RemoteGateway, DimensionMismatchIsGatewayError) {
  auto cfg = live_config();
  cfg.embed_dim = 8;
  auto g = Gateway::remote(cfg, std::make_shared<FlakyTransport>(0, 0), [](double) {});
  EXPECT_THROW(g->embed({EmbedKind::kText, "x", "", ""}), GatewayError);
}

TEST(RemoteGateway, MissingFrameUnderRootIsInputError) {
  testing::TempDir tmp;
  auto cfg = live_config();
  cfg.frame_root = tmp.path().string();
  auto g = Gateway::remote(cfg, std::make_shared<FlakyTransport>(0, 0), [](double) {});
  CaptionRequest r;
  r.frames = {frame_locator("v1", 2)};
  r.prompt = "p";
  EXPECT_THROW(g->caption(r), InputError);
}

// Envelope server for all three capabilities on one loopback port.
class EnvelopeServer {
 public:
  EnvelopeServer() {
    auto wrap = [](const httplib::Request& req, httplib::Response& res, const std::function<Json(const Json&)>& f) {
      const auto env = Json::parse(req.body);
      Json out = {{"ok", true}, {"request_id", env.at("request_id")}, {"result", f(env.at("payload"))}};
      res.set_content(out.dump(), "application/json");
    };
    srv_.Post("/embed", [wrap](const httplib::Request& q, httplib::Response& r) {
      wrap(q, r, [](const Json&) { return Json({{"vector", {1.0, 1.0, 0.0}}}); });
    });
    srv_.Post("/caption", [wrap](const httplib::Request& q, httplib::Response& r) {
      wrap(q, r, [](const Json& p) { return Json({{"text", "saw " + std::to_string(p.at("frames").size()) + " frames \n"}}); });
    });
    srv_.Post("/answer", [wrap](const httplib::Request& q, httplib::Response& r) {
      wrap(q, r, [](const Json& p) { return Json({{"text", p.at("options").empty() ? "free" : "C"}}); });
    });
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~EnvelopeServer() {
    srv_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server srv_;
  int port_ = 0;
  std::thread thread_;
};

TEST(RemoteGateway, EnvelopeRoundTripOverLoopback) {
  EnvelopeServer server;
  GatewayConfig cfg;
  cfg.offline = false;
  cfg.embed_url = server.url("/embed");
  cfg.caption_url = server.url("/caption");
  cfg.answer_url = server.url("/answer");
  cfg.embed_dim = 3;
  cfg.timeout_s = 5;
  auto g = Gateway::remote(cfg);
  const auto e = g->embed({EmbedKind::kText, "hi", "", ""});
  EXPECT_NEAR(e.vector[0], std::sqrt(0.5), 1e-12);
  CaptionRequest c;
  c.frames = {frame_locator("v", 0), frame_locator("v", 2)};
  c.prompt = "p";
  EXPECT_EQ(g->caption(c).text, "saw 2 frames");
  AnswerRequest a;
  a.question = "q";
  a.options = {"x", "y", "z"};
  EXPECT_EQ(g->answer(a).text, "C");
  EXPECT_EQ(g->log().count(Capability::kAnswer), 1u);
}

TEST(RemoteGateway, UnreachableEndpointGivesGatewayError) {
  auto cfg = live_config();
  cfg.max_retries = 1;
  cfg.timeout_s = 1;
  auto g = Gateway::remote(cfg, nullptr, [](double) {});
  EXPECT_THROW(g->embed({EmbedKind::kText, "x", "", ""}), GatewayError);
}

}  // namespace
}  // namespace mmvir::gw
