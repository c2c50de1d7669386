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
#include "mmvir/eval_report.hpp"
#include "test_util.hpp"

namespace mmvir::eval {
namespace {

double metric(const EvalReport& r, const std::string& name) {
  for (const auto& m : r.metrics) {
    if (m.name == name) return m.value;
  }
  ADD_FAILURE() << "no metric " << name;
  return -1;
}

TEST(Gold, QaLinesAndErrors) {
  const auto g = parse_qa_gold("{\"id\": \"q1\", \"answer\": \"B\", \"category\": \"count\"}\n\n{\"id\": 2, \"answer\": \"A\"}\n");
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].category, "count");
  EXPECT_EQ(g[1].id, "2");
  EXPECT_THROW(parse_qa_gold(""), InputError);
  try {
    parse_qa_gold("{\"id\": \"q1\", \"answer\": \"B\"}\n{broken\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_qa_gold("{\"id\": \"q1\", \"answer\": \"B\"}\n{\"id\": \"q1\", \"answer\": \"C\"}\n"), InputError);
  EXPECT_THROW(parse_qa_gold("{\"id\": \"q1\"}\n"), InputError);
}

TEST(Gold, RetrievalNeedsFramesOrInterval) {
  const auto g = parse_retrieval_gold("{\"id\": \"a\", \"frames\": [1.5], \"interval\": [0, 10], \"video_id\": \"v\"}\n");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].interval, (TimeInterval{0, 10}));
  EXPECT_EQ(g[0].video_id, "v");
  EXPECT_THROW(parse_retrieval_gold("{\"id\": \"a\"}\n"), InputError);
  EXPECT_THROW(parse_retrieval_gold("{\"id\": \"a\", \"interval\": [10, 0]}\n"), InputError);
}

TEST(Gold, Summaries) {
  const auto g = parse_summary_gold("{\"id\": \"v1\", \"reference\": \"a man cooks\"}\n");
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].reference, "a man cooks");
  EXPECT_THROW(parse_summary_gold("{\"id\": \"v1\"}\n"), InputError);
}

TEST(Categories, BreakdownWithAndWithoutTags) {
  const std::vector<QARecord> tagged = {{"1", "A", "A", "count"}, {"2", "B", "A", "count"}, {"3", "C", "C", "action"},
                                        {"4", "D", "D", ""}};
  const auto rows = category_breakdown(tagged);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].category, "action");
  EXPECT_EQ(rows[1].category, "count");
  EXPECT_EQ(rows[1].correct, 1u);
  EXPECT_EQ(rows[1].total, 2u);
  EXPECT_EQ(rows[2].category, "untagged");
  EXPECT_EQ(rows[3].category, "overall");
  EXPECT_NEAR(rows[3].accuracy, 0.75, 1e-12);

  const std::vector<QARecord> plain = {{"1", "A", "A", ""}, {"2", "B", "A", ""}};
  const auto only = category_breakdown(plain);
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only[0].category, "overall");
}

TEST(EvaluateQa, CountsMissingAndNoParse) {
  const Json results = {{"kind", "qa_results"},
                        {"results", {{{"id", "q1"}, {"choice", "B"}}, {{"id", "q2"}, {"choice", nullptr}}}}};
  const std::vector<QaGold> gold = {{"q1", "B", ""}, {"q2", "A", ""}, {"q3", "C", ""}};
  const auto r = evaluate_qa(results, gold);
  EXPECT_NEAR(metric(r, "accuracy"), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(metric(r, "no_parse"), 1.0);
  EXPECT_EQ(metric(r, "missing"), 1.0);
  EXPECT_THROW(evaluate_qa(results, std::vector<QaGold>{}), InputError);
}

TEST(EvaluateSummaries, ScoresAgainstReferences) {
  const Json results = {{"kind", "summary_results"},
                        {"results", {{{"id", "v1"}, {"summary", "the cat sat on the mat"}}}}};
  const std::vector<SummaryGold> gold = {{"v1", "the cat was on the mat"}};
  const auto r = evaluate_summaries(results, gold);
  EXPECT_NEAR(metric(r, "rouge2_f1"), 0.6, 1e-12);
  EXPECT_NEAR(metric(r, "rougeL_f1"), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(metric(r, "missing"), 0.0);
}

Json locate_results() {
  return {{"kind", "locate_results"},
          {"results",
           {{{"id", "a"},
             {"intervals",
              {{{"video_id", "v"}, {"start_s", 100.0}, {"end_s", 200.0}},
               {{"video_id", "v"}, {"start_s", 0.0}, {"end_s", 100.0}}}}}}}};
}

TEST(EvaluateRetrieval, PrecisionAndOverlapPerK) {
  const std::vector<RetrievalGold> gold = {{"a", "v", {50}, TimeInterval{150, 250}}};
  EvalOptions opts;
  opts.ks = {1, 2};
  const auto r = evaluate_retrieval(locate_results(), gold, opts);
  EXPECT_EQ(metric(r, "precision@1"), 0.0);
  EXPECT_EQ(metric(r, "precision@2"), 1.0);
  EXPECT_NEAR(metric(r, "overlap@1"), 0.5, 1e-12);
  opts.overlap = OverlapMode::kIoU;
  const auto iou = evaluate_retrieval(locate_results(), gold, opts);
  EXPECT_NEAR(metric(iou, "overlap@1_iou"), 50.0 / 150.0, 1e-12);
}

TEST(EvalReport, DispatchRenderAndLatency) {
  testing::TempDir tmp;
  write_file_atomic(tmp.path() / "gold.jsonl", "{\"id\": \"a\", \"frames\": [150]}\n");
  auto results = locate_results();
  results["latency"] = LatencyLog{10, 20, 5, 1}.to_json();
  const auto r = eval_report(results, tmp.path() / "gold.jsonl");
  EXPECT_EQ(r.task, "retrieval");
  ASSERT_TRUE(r.latency.has_value());
  EXPECT_DOUBLE_EQ(r.latency->total(), 36.0);
  const auto j = r.to_json();
  EXPECT_EQ(j.at("kind"), "eval_report");
  EXPECT_DOUBLE_EQ(j.at("latency").at("total_s").get<double>(), 36.0);
  const auto text = r.render();
  EXPECT_NE(text.find("precision@1"), std::string::npos);
  EXPECT_NE(text.find("total 36.000"), std::string::npos);
  EXPECT_THROW(eval_report(Json{{"kind", "nonsense"}}, tmp.path() / "gold.jsonl"), InputError);
  EXPECT_THROW(eval_report(Json::object(), tmp.path() / "gold.jsonl"), InputError);
}

}  // namespace
}  // namespace mmvir::eval
