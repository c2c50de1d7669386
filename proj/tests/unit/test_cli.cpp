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

#include <atomic>
#include <sstream>

#include "mmvir/cli.hpp"
#include "mmvir/error.hpp"
#include "mmvir/metrics.hpp"
#include "mmvir/synth.hpp"
#include "test_util.hpp"

namespace mmvir::cli {
namespace {

// Runs the CLI with an empty environment so host variables cannot leak in.
struct Run {
  int code = 0;
  std::string out, err;
};

Run run_cli(const std::vector<std::string>& args, Environment env = {}) {
  if (!env.getenv) env.getenv = [](const char*) -> const char* { return nullptr; };
  std::ostringstream out, err;
  Run r;
  r.code = run(args, out, err, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliWorkflow : public ::testing::Test {
 protected:
  void SetUp() override {
    series_ = (tmp_.path() / "hour.txt").string();
    write_file_atomic(series_, series_to_text(synth::hour_long_video(7).series));
    queries_ = (tmp_.path() / "q.jsonl").string();
    write_file_atomic(queries_,
                      "{\"id\": \"q1\", \"question\": \"what is happening\", \"options\": [\"cooking\", \"walking\"]}\n"
                      "# comment\n"
                      "which clip shows the garden\n"
                      "{\"id\": \"bad\"}\n");
  }
  std::string p(const std::string& name) const { return (tmp_.path() / name).string(); }
  std::string build_doc(const std::string& name = "doc.json") {
    const auto r = run_cli({"build", series_, "-o", p(name)});
    EXPECT_EQ(r.code, 0) << r.err;
    return p(name);
  }

  testing::TempDir tmp_;
  std::string series_, queries_;
};

TEST(CliBasics, ParseQueryFile) {
  const auto q = parse_query_file("{\"id\": 5, \"query\": \"x\"}\n\n# skip\nplain text\n{oops\n{\"id\": \"a\"}\n");
  ASSERT_EQ(q.queries.size(), 2u);
  EXPECT_EQ(q.queries[0].id, "5");
  EXPECT_EQ(q.queries[1].id, "4");
  EXPECT_EQ(q.queries[1].text, "plain text");
  ASSERT_EQ(q.errors.size(), 2u);
  EXPECT_EQ(q.errors[0].first, 5u);
  EXPECT_EQ(q.errors[1].first, 6u);
}

TEST(CliBasics, KSuffix) {
  EXPECT_EQ(k_suffixed("out.json", 5), "out.k5.json");
  EXPECT_EQ(k_suffixed("dir/res", 10), "dir/res.k10");
}

TEST(CliBasics, BoundaryJsonRoundTrip) {
  BoundaryFile b{"v", 120.0, "kts", {0, 33.3333333, 120}};
  const auto back = boundaries_from_json(boundaries_to_json(b, Json::object(), Json::object()));
  EXPECT_EQ(back.video_id, "v");
  EXPECT_EQ(back.method, "kts");
  EXPECT_EQ(back.boundaries, (std::vector<double>{0, 33.333333, 120}));
  EXPECT_THROW(boundaries_from_json(Json{{"kind", "other"}}), InputError);
}

TEST(CliBasics, ExitCodesForUsageErrors) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"segment"}).code, 2);
  EXPECT_EQ(run_cli({"segment", "/nonexistent/s.txt", "-o", "/tmp/x.json"}).code, 2);
}

TEST_F(CliWorkflow, SegmentWritesBoundariesForBothMethods) {
  const auto pct = run_cli({"segment", series_, "-o", p("pct.json")});
  ASSERT_EQ(pct.code, 0) << pct.err;
  const auto kts = run_cli({"segment", series_, "-o", p("kts.json"), "--method", "kts"});
  ASSERT_EQ(kts.code, 0) << kts.err;
  const auto bp = boundaries_from_json(parse_json(read_file(p("pct.json")), "b"));
  const auto bk = boundaries_from_json(parse_json(read_file(p("kts.json")), "b"));
  EXPECT_EQ(bp.method, "percentile");
  EXPECT_EQ(bk.method, "kts");
  EXPECT_EQ(bp.boundaries.front(), 0.0);
  EXPECT_EQ(bk.boundaries.back(), bp.boundaries.back());
  const auto planted = synth::hour_long_video(7);
  for (std::size_t i = 1; i + 1 < planted.boundaries.size(); ++i) {
    const double t = planted.boundaries[i];
    EXPECT_TRUE(std::any_of(bk.boundaries.begin(), bk.boundaries.end(), [&](double x) { return std::abs(x - t) <= 2; }))
        << t;
  }
  const auto j = parse_json(read_file(p("pct.json")), "b");
  EXPECT_TRUE(j.contains("signal_report"));
  EXPECT_EQ(j.at("config").at("build").at("segmentation").at("method"), "percentile");
}

TEST_F(CliWorkflow, BadConfigValueIsExitTwo) {
  const auto r = run_cli({"segment", series_, "-o", p("b.json"), "--set", "min_clip_s=abc"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("min_clip_s"), std::string::npos);
  EXPECT_EQ(run_cli({"segment", series_, "-o", p("b.json"), "--set", "novalue"}).code, 2);
  write_file_atomic(p("cfg.json"), "{\"percentile_q\": 150}");
  EXPECT_EQ(run_cli({"segment", series_, "-o", p("b.json"), "--config", p("cfg.json")}).code, 2);
}

TEST_F(CliWorkflow, ConfigFileEnvAndFlagPrecedence) {
  write_file_atomic(p("cfg.json"), "{\"min_clip_s\": 900}");
  Environment env;
  env.getenv = [](const char* k) -> const char* { return std::string(k) == "MMVIR_MIN_CLIP_S" ? "600" : nullptr; };
  ASSERT_EQ(run_cli({"segment", series_, "-o", p("a.json"), "--config", p("cfg.json")}, env).code, 0);
  EXPECT_EQ(parse_json(read_file(p("a.json")), "a").at("config").at("build").at("segmentation").at("min_clip_s"), 600.0);
  ASSERT_EQ(run_cli({"segment", series_, "-o", p("b.json"), "--config", p("cfg.json"), "--min-clip-s", "450"}, env).code, 0);
  EXPECT_EQ(parse_json(read_file(p("b.json")), "b").at("config").at("build").at("segmentation").at("min_clip_s"), 450.0);
  ASSERT_EQ(run_cli({"segment", series_, "-o", p("c.json"), "--config", p("cfg.json")}).code, 0);
  EXPECT_EQ(parse_json(read_file(p("c.json")), "c").at("config").at("build").at("segmentation").at("min_clip_s"), 900.0);
}

TEST_F(CliWorkflow, BuildIsIdempotentAndTimingsAreSeparate) {
  const auto a = build_doc("a.json");
  ASSERT_EQ(run_cli({"build", series_, "-o", p("b.json"), "--timings", p("t.json")}).code, 0);
  EXPECT_EQ(read_file(a), read_file(p("b.json")));
  EXPECT_FALSE(std::filesystem::exists(a + ".ckpt"));
  const auto t = parse_json(read_file(p("t.json")), "t");
  EXPECT_EQ(t.at("kind"), "latency");
  EXPECT_GE(t.at("caption_s").get<double>(), 0.0);
}

TEST_F(CliWorkflow, BuildRejectsMissingFrameRoot) {
  EXPECT_EQ(run_cli({"build", series_, "-o", p("d.json"), "--frames", p("nope")}).code, 2);
}

TEST_F(CliWorkflow, AskLocateSummarizeEval) {
  const auto doc = build_doc();
  ASSERT_EQ(run_cli({"index", "--doc", doc, "-o", p("idx.mvix")}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(p("idx.mvix.meta.json")));

  const auto ask = run_cli({"ask", "--doc", doc, "--index", p("idx.mvix"), "--queries", queries_, "-o", p("ask.json")});
  ASSERT_EQ(ask.code, 0) << ask.err;
  const auto res = parse_json(read_file(p("ask.json")), "ask");
  EXPECT_EQ(res.at("kind"), "qa_results");
  EXPECT_EQ(res.at("results").size(), 2u);
  ASSERT_EQ(res.at("errors").size(), 1u);
  EXPECT_EQ(res.at("errors")[0].at("line"), 4);
  EXPECT_TRUE(res.at("results")[0].at("choice").is_string());
  EXPECT_FALSE(res.at("results")[0].at("retrieved").empty());

  // Same inputs give the same bytes, with or without a prebuilt index.
  ASSERT_EQ(run_cli({"ask", "--doc", doc, "--queries", queries_, "-o", p("ask2.json")}).code, 0);
  EXPECT_EQ(read_file(p("ask.json")), read_file(p("ask2.json")));

  write_file_atomic(p("qa_gold.jsonl"), "{\"id\": \"q1\", \"answer\": \"A\"}\n{\"id\": \"3\", \"answer\": \"B\"}\n");
  const auto ev = run_cli({"eval", "--results", p("ask.json"), "--gold", p("qa_gold.jsonl"), "-o", p("rep.json")});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("accuracy"), std::string::npos);
  EXPECT_EQ(parse_json(read_file(p("rep.json")), "rep").at("task"), "qa");

  ASSERT_EQ(run_cli({"locate", "--doc", doc, "--queries", queries_, "-o", p("loc.json"), "--k", "2"}).code, 0);
  const auto loc = parse_json(read_file(p("loc.json")), "loc");
  EXPECT_EQ(loc.at("kind"), "locate_results");
  EXPECT_EQ(loc.at("results")[0].at("intervals").size(), 2u);
  write_file_atomic(p("ret_gold.jsonl"), "{\"id\": \"q1\", \"frames\": [100], \"interval\": [0, 600]}\n");
  EXPECT_EQ(run_cli({"eval", "--results", p("loc.json"), "--gold", p("ret_gold.jsonl"), "--k", "1,2"}).code, 0);
  EXPECT_EQ(run_cli({"eval", "--results", p("loc.json"), "--gold", p("ret_gold.jsonl"), "--overlap", "iou"}).code, 0);

  ASSERT_EQ(run_cli({"summarize", "--doc", doc, "-o", p("sum.json")}).code, 0);
  write_file_atomic(p("sum_gold.jsonl"), "{\"id\": \"synth_hour\", \"reference\": \"a person does many things\"}\n");
  write_file_atomic(p("t1.json"), eval::LatencyLog{10, 20, 0, 0}.to_json().dump());
  write_file_atomic(p("t2.json"), eval::LatencyLog{0, 0, 5, 1}.to_json().dump());
  const auto sev = run_cli({"eval", "--results", p("sum.json"), "--gold", p("sum_gold.jsonl"), "--latency", p("t1.json"),
                            "--latency", p("t2.json"), "-o", p("srep.json")});
  ASSERT_EQ(sev.code, 0) << sev.err;
  EXPECT_DOUBLE_EQ(parse_json(read_file(p("srep.json")), "s").at("latency").at("total_s").get<double>(), 36.0);

  write_file_atomic(p("empty.jsonl"), "");
  EXPECT_EQ(run_cli({"eval", "--results", p("ask.json"), "--gold", p("empty.jsonl")}).code, 2);
  EXPECT_EQ(run_cli({"eval", "--results", p("ask.json"), "--gold", p("missing.jsonl")}).code, 2);
}

TEST_F(CliWorkflow, KSweepWritesOneFilePerValue) {
  const auto doc = build_doc();
  ASSERT_EQ(run_cli({"ask", "--doc", doc, "--queries", queries_, "-o", p("sweep.json"), "--k", "1,3,5,10"}).code, 0);
  for (int k : {1, 3, 5, 10}) {
    const auto f = p("sweep.k" + std::to_string(k) + ".json");
    ASSERT_TRUE(std::filesystem::exists(f)) << f;
    EXPECT_EQ(parse_json(read_file(f), "s").at("config").at("k"), k);
  }
  EXPECT_EQ(run_cli({"ask", "--doc", doc, "--queries", queries_, "-o", p("x.json"), "--k", "1,zero"}).code, 2);
}

TEST_F(CliWorkflow, StatsForSeriesAndDocument) {
  const auto s = run_cli({"stats", "--embeddings", series_, "-o", p("s.json")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(parse_json(read_file(p("s.json")), "s").at("kind"), "series_stats");
  const auto doc = build_doc();
  const auto d = run_cli({"stats", "--doc", doc});
  EXPECT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(run_cli({"stats"}).code, 2);
}

// Gateway whose answerer always fails, or a factory that throws a plain error.
class DownAnswerer final : public gw::Answerer {
 public:
  gw::AnswerResponse answer(const gw::AnswerRequest&) override { throw GatewayError("answer service down"); }
  std::string identity() const override { return "down"; }
};

TEST_F(CliWorkflow, GatewayAndInternalFailureExitCodes) {
  const auto doc = build_doc();
  Environment down;
  down.make_gateway = [](const gw::GatewayConfig& c) {
    return std::make_unique<gw::Gateway>(std::make_unique<gw::MockEmbedder>(c.embed_dim), std::make_unique<gw::MockCaptioner>(),
                                         std::make_unique<DownAnswerer>(), c);
  };
  const auto r = run_cli({"ask", "--doc", doc, "--queries", queries_, "-o", p("a.json")}, down);
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("answer service down"), std::string::npos);

  Environment broken;
  broken.make_gateway = [](const gw::GatewayConfig&) -> std::unique_ptr<gw::Gateway> { throw std::logic_error("bug"); };
  EXPECT_EQ(run_cli({"summarize", "--doc", doc, "-o", p("s.json")}, broken).code, 1);
}

class FlakyCaptioner final : public gw::Captioner {
 public:
  explicit FlakyCaptioner(int fail_at) : fail_at_(fail_at) {}
  gw::CaptionResponse caption(const gw::CaptionRequest& req) override {
    if (req.tag == "timeline" && ++timeline_ == fail_at_) throw GatewayError("captioner outage");
    return inner_.caption(req);
  }
  std::string identity() const override { return inner_.identity(); }

 private:
  int fail_at_;
  std::atomic<int> timeline_{0};
  gw::MockCaptioner inner_;
};

TEST_F(CliWorkflow, ResumeAfterGatewayFailureMatchesCleanBuild) {
  const auto clean = build_doc("clean.json");
  Environment flaky;
  flaky.make_gateway = [](const gw::GatewayConfig& c) {
    return std::make_unique<gw::Gateway>(std::make_unique<gw::MockEmbedder>(c.embed_dim),
                                         std::make_unique<FlakyCaptioner>(4), std::make_unique<gw::MockAnswerer>(c.embed_dim), c);
  };
  const auto failed = run_cli({"build", series_, "-o", p("r.json")}, flaky);
  EXPECT_EQ(failed.code, 3);
  EXPECT_TRUE(std::filesystem::exists(p("r.json.ckpt")));
  EXPECT_FALSE(std::filesystem::exists(p("r.json")));
  const auto resumed = run_cli({"build", series_, "-o", p("r.json"), "--resume"});
  ASSERT_EQ(resumed.code, 0) << resumed.err;
  EXPECT_EQ(read_file(p("r.json")), read_file(clean));
}

}  // namespace
}  // namespace mmvir::cli
