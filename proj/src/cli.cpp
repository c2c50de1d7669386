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

#include "mmvir/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ostream>

#include "mmvir/builder.hpp"
#include "mmvir/config.hpp"
#include "mmvir/error.hpp"
#include "mmvir/eval_report.hpp"
#include "mmvir/retrieval.hpp"
#include "mmvir/segmentation.hpp"
#include "mmvir/series.hpp"
#include "mmvir/text.hpp"

namespace mmvir::cli {

// --- shared formats --------------------------------------------------------------

QueryFile parse_query_file(std::string_view text) {
  QueryFile out;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text::trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    if (line.front() != '{') {
      out.queries.push_back({std::to_string(line_no), std::string(line), {}});
      continue;
    }
    try {
      const auto j = Json::parse(line);
      Query q;
      if (j.contains("id")) {
        q.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
      } else {
        q.id = std::to_string(line_no);
      }
      if (j.contains("question")) {
        q.text = j["question"].get<std::string>();
      } else if (j.contains("query")) {
        q.text = j["query"].get<std::string>();
      } else {
        throw InputError("missing 'question' or 'query'");
      }
      if (text::trim(q.text).empty()) throw InputError("empty query text");
      if (j.contains("options")) q.options = j["options"].get<std::vector<std::string>>();
      out.queries.push_back(std::move(q));
    } catch (const std::exception& e) {
      out.errors.emplace_back(line_no, e.what());
    }
  }
  return out;
}

Json boundaries_to_json(const BoundaryFile& b, const Json& config, const Json& signal_report) {
  Json bs = Json::array();
  for (double t : b.boundaries) bs.push_back(text::quantize6(t));
  return {{"kind", "boundaries"},
          {"schema_version", 1},
          {"video_id", b.video_id},
          {"duration_s", text::quantize6(b.duration_s)},
          {"method", b.method},
          {"boundaries", bs},
          {"config", config},
          {"signal_report", signal_report}};
}

BoundaryFile boundaries_from_json(const Json& j) {
  try {
    if (j.at("kind").get<std::string>() != "boundaries") throw InputError("not a boundaries file");
    BoundaryFile b;
    b.video_id = j.at("video_id").get<std::string>();
    b.duration_s = j.at("duration_s").get<double>();
    b.method = j.at("method").get<std::string>();
    b.boundaries = j.at("boundaries").get<std::vector<double>>();
    return b;
  } catch (const Json::exception& e) {
    throw InputError(std::string("boundaries file: ") + e.what());
  }
}

std::string k_suffixed(const std::string& path, std::size_t k) {
  const std::filesystem::path p(path);
  auto name = p.stem().string() + ".k" + std::to_string(k) + p.extension().string();
  return (p.parent_path() / name).string();
}

// --- command implementations --------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Common {
  std::string config_path;
  std::vector<std::string> sets;  // key=value
  config::Layer flags;
  std::string timings;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err, Environment env) : out_(out), err_(err), env_(std::move(env)) {
    if (!env_.getenv) env_.getenv = [](const char* k) -> const char* { return std::getenv(k); };
    if (!env_.make_gateway) env_.make_gateway = [](const gw::GatewayConfig& c) { return gw::Gateway::from_config(c); };
  }

  config::RunConfig resolve(const Common& c) const {
    config::Layer file;
    std::string path = c.config_path;
    if (path.empty()) {
      if (const char* p = env_.getenv("MMVIR_CONFIG")) path = p;
    }
    if (!path.empty()) file = config::load_file_layer(path);
    auto flags = c.flags;
    for (const auto& kv : c.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw InputError("--set expects KEY=VALUE, got '" + kv + "'");
      flags[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return config::load_run_config(file, config::env_layer(env_.getenv), flags);
  }

  std::unique_ptr<gw::Gateway> gateway(const config::RunConfig& cfg) const { return env_.make_gateway(cfg.gateway); }

  void write_timings(const Common& c, const eval::LatencyLog& lat) const {
    if (c.timings.empty()) return;
    auto j = lat.to_json();
    j["kind"] = "latency";
    write_file_atomic(c.timings, canonical_dump(j));
  }

  // segment -------------------------------------------------------------------
  int segment(const Common& c, const std::string& embeddings, const std::string& out_path) {
    const auto cfg = resolve(c);
    const auto t0 = Clock::now();
    const auto series = load_series(embeddings);
    const auto bounds = seg::segment(series, cfg.build.segmentation);
    const auto report = seg::signal_report(seg::consecutive_similarity(series));
    BoundaryFile b{series.video_id, series.duration(), seg::to_string(cfg.build.segmentation.method), bounds};
    const auto j = boundaries_to_json(b, cfg.snapshot(), report.to_json());
    write_file_atomic(out_path, canonical_dump(j));
    eval::LatencyLog lat;
    lat.segment_s = seconds_since(t0);
    write_timings(c, lat);
    out_.setf(std::ios::fixed);
    out_ << "segmented " << series.video_id << ": " << (bounds.size() - 1) << " clips over "
         << text::fixed6(series.duration()) << " s (" << b.method << ")\n";
    out_ << "similarity: min " << text::fixed6(report.min) << ", p2 "
         << text::fixed6(seg::percentile_threshold(seg::consecutive_similarity(series), 2.0)) << ", below p2 "
         << report.below_p2 << "\n";
    return 0;
  }

  // build ---------------------------------------------------------------------
  int build(const Common& c, const std::string& embeddings, const std::string& out_path,
            const std::string& frames, const std::string& checkpoint, bool resume) {
    auto cfg = resolve(c);
    if (!frames.empty()) {
      if (!std::filesystem::is_directory(frames)) throw InputError("frame root '" + frames + "' is not a directory");
      cfg.gateway.frame_root = frames;
    } else if (!cfg.gateway.frame_root.empty() && !std::filesystem::is_directory(cfg.gateway.frame_root)) {
      throw InputError("frame root '" + cfg.gateway.frame_root + "' is not a directory");
    }
    const auto series = load_series(embeddings);
    auto gwy = gateway(cfg);
    build::BuildOptions opts;
    opts.checkpoint = checkpoint.empty() ? out_path + ".ckpt" : checkpoint;
    opts.resume = resume;
    build::BuildReport rep;
    const auto doc = build::build_document(series, cfg.build, *gwy, opts, &rep);
    save_document(doc, out_path);
    eval::LatencyLog lat;
    lat.segment_s = rep.segment_s;
    lat.caption_s = rep.caption_s;
    write_timings(c, lat);
    std::size_t subs = 0, fine = 0;
    for (const auto& clip : doc.clips) {
      subs += clip.subsegments.size();
      for (const auto& s : clip.subsegments) fine += s.fine.size();
    }
    out_ << "built " << doc.video_id << ": " << doc.clips.size() << " clips, " << subs << " sub-segments, " << fine
         << " fine pairs";
    if (rep.resumed_clips) out_ << " (" << rep.resumed_clips << " clips from checkpoint)";
    out_ << "\n";
    return 0;
  }

  // index ---------------------------------------------------------------------
  int index(const Common& c, const std::vector<std::string>& doc_paths, const std::string& out_path) {
    const auto cfg = resolve(c);
    const auto docs = load_docs(doc_paths);
    auto gwy = gateway(cfg);
    const auto t0 = Clock::now();
    const auto idx = retrieval::build_index(docs, *gwy);
    retrieval::save_index(idx, out_path);
    Json meta = {{"kind", "index_meta"},
                 {"config", cfg.snapshot()},
                 {"fingerprint", idx.fingerprint()},
                 {"dim", idx.dim()},
                 {"entries", idx.size()},
                 {"documents", doc_ids(docs)}};
    write_file_atomic(out_path + ".meta.json", canonical_dump(meta));
    eval::LatencyLog lat;
    lat.index_s = seconds_since(t0);
    write_timings(c, lat);
    out_ << "indexed " << idx.size() << " timeline entries from " << docs.size() << " document(s)\n";
    return 0;
  }

  // ask / locate ----------------------------------------------------------------
  int query_cmd(const Common& c, bool is_ask, const std::vector<std::string>& doc_paths,
                const std::string& index_path, const std::string& query_path, const std::string& out_path,
                const std::vector<std::size_t>& ks) {
    auto base = resolve(c);
    const auto docs = load_docs(doc_paths);
    const auto qf = parse_query_file(read_file(query_path));
    for (const auto& [line, msg] : qf.errors) err_ << query_path << ":" << line << ": skipped: " << msg << "\n";
    if (qf.queries.empty()) throw InputError(query_path + ": no valid queries");
    auto gwy = gateway(base);
    retrieval::TimelineIndex idx;
    const auto t_index = Clock::now();
    idx = index_path.empty() ? retrieval::build_index(docs, *gwy) : retrieval::load_index(index_path);
    const double index_s = index_path.empty() ? seconds_since(t_index) : 0.0;

    std::vector<std::size_t> sweep = ks.empty() ? std::vector<std::size_t>{base.k} : ks;
    eval::LatencyLog lat;
    lat.index_s = index_s;
    for (auto k : sweep) {
      if (k == 0) throw InputError("--k values must be >= 1");
      auto cfg = base;
      cfg.k = k;
      Json results = Json::array();
      const auto t0 = Clock::now();
      for (const auto& q : qf.queries) {
        results.push_back(is_ask ? ask_one(idx, docs, q, cfg, *gwy) : locate_one(idx, q, cfg, *gwy));
      }
      lat.answer_s += seconds_since(t0);
      Json errors = Json::array();
      for (const auto& [line, msg] : qf.errors) errors.push_back({{"line", line}, {"message", msg}});
      Json doc = {{"kind", is_ask ? "qa_results" : "locate_results"},
                  {"config", cfg.snapshot()},
                  {"index_fingerprint", idx.fingerprint()},
                  {"results", results},
                  {"errors", errors}};
      const auto path = sweep.size() > 1 ? k_suffixed(out_path, k) : out_path;
      write_file_atomic(path, canonical_dump(doc));
      out_ << (is_ask ? "answered " : "located ") << qf.queries.size() << " queries at k=" << k << " -> " << path
           << "\n";
    }
    write_timings(c, lat);
    return 0;
  }

  Json ask_one(const retrieval::TimelineIndex& idx, const std::vector<VideoDocument>& docs, const Query& q,
               const config::RunConfig& cfg, gw::Gateway& gwy) {
    const auto r = retrieval::answer_question(idx, docs, q.text, q.options, cfg.k, cfg.mode, gwy);
    return {{"id", q.id},
            {"question", q.text},
            {"options", q.options},
            {"choice", r.choice ? Json(*r.choice) : Json(nullptr)},
            {"raw_answer", r.raw_answer},
            {"retrieved", hits_json(idx, r.retrieved)},
            {"context",
             {{"blocks", r.stats.blocks},
              {"text_blocks", r.stats.text_blocks},
              {"frame_blocks", r.stats.frame_blocks},
              {"token_estimate", r.stats.token_estimate}}}};
  }

  Json locate_one(const retrieval::TimelineIndex& idx, const Query& q, const config::RunConfig& cfg,
                  gw::Gateway& gwy) {
    const auto located = retrieval::locate(idx, q.text, cfg.k, gwy);
    Json ivs = Json::array();
    for (const auto& l : located) {
      ivs.push_back({{"video_id", l.video_id},
                     {"clip_id", l.clip_id},
                     {"start_s", l.interval.start_s},
                     {"end_s", l.interval.end_s},
                     {"score", l.score}});
    }
    return {{"id", q.id}, {"query", q.text}, {"intervals", ivs}};
  }

  static Json hits_json(const retrieval::TimelineIndex& idx, const retrieval::RetrievalResult& r) {
    Json a = Json::array();
    for (const auto& h : r.hits) {
      const auto& e = idx.entries()[h.entry];
      a.push_back({{"video_id", e.video_id},
                   {"clip_id", e.clip_id},
                   {"score", h.score},
                   {"start_s", e.interval.start_s},
                   {"end_s", e.interval.end_s}});
    }
    return a;
  }

  // summarize -----------------------------------------------------------------------
  int summarize(const Common& c, const std::vector<std::string>& doc_paths, const std::string& out_path) {
    const auto cfg = resolve(c);
    const auto docs = load_docs(doc_paths);
    auto gwy = gateway(cfg);
    Json results = Json::array();
    const auto t0 = Clock::now();
    for (const auto& d : docs) {
      const auto s = retrieval::summarize(d, *gwy);
      results.push_back({{"id", d.video_id},
                         {"summary", s.summary},
                         {"context", {{"blocks", s.stats.blocks}, {"token_estimate", s.stats.token_estimate}}}});
    }
    eval::LatencyLog lat;
    lat.answer_s = seconds_since(t0);
    write_timings(c, lat);
    Json doc = {{"kind", "summary_results"}, {"config", cfg.snapshot()}, {"results", results}};
    write_file_atomic(out_path, canonical_dump(doc));
    out_ << "summarized " << docs.size() << " document(s) -> " << out_path << "\n";
    return 0;
  }

  // eval ----------------------------------------------------------------------------
  int evaluate(const Common& c, const std::string& results_path, const std::string& gold_path,
               const std::vector<std::size_t>& ks, const std::vector<std::string>& latency_files,
               const std::string& out_path) {
    const auto cfg = resolve(c);
    const auto results = parse_json(read_file(results_path), results_path);
    eval::EvalOptions opts;
    opts.overlap = cfg.overlap;
    if (!ks.empty()) opts.ks = ks;
    auto rep = eval::eval_report(results, gold_path, opts);
    for (const auto& f : latency_files) {
      auto l = eval::LatencyLog::from_json(parse_json(read_file(f), f));
      if (!rep.latency) rep.latency = eval::LatencyLog{};
      *rep.latency += l;
    }
    out_ << rep.render();
    if (!out_path.empty()) {
      auto j = rep.to_json();
      j["config"] = cfg.snapshot();
      if (results.contains("config")) j["run_config"] = results["config"];
      write_file_atomic(out_path, canonical_dump(j));
    }
    return 0;
  }

  // stats ---------------------------------------------------------------------------
  int stats(const Common& c, const std::string& embeddings, const std::string& doc_path, const std::string& out_path) {
    const auto cfg = resolve(c);
    Json j;
    if (!embeddings.empty()) {
      const auto series = load_series(embeddings);
      j = {{"kind", "series_stats"},
           {"video_id", series.video_id},
           {"frames", series.size()},
           {"dim", series.dim},
           {"fps", series.fps},
           {"duration_s", series.duration()},
           {"signal_report", seg::signal_report(seg::consecutive_similarity(series)).to_json()}};
    } else if (!doc_path.empty()) {
      const auto doc = load_document(doc_path);
      std::size_t subs = 0, fine = 0, sentinels = 0, truncated = 0;
      for (const auto& clip : doc.clips) {
        truncated += clip.timeline.truncated ? 1 : 0;
        subs += clip.subsegments.size();
        for (const auto& s : clip.subsegments) {
          fine += s.fine.size();
          sentinels += (s.coarse.action_sentinel ? 1 : 0) + (s.coarse.scene_sentinel ? 1 : 0) +
                       (s.coarse.object_sentinel ? 1 : 0);
          for (const auto& f : s.fine) sentinels += f.sentinel ? 1 : 0;
        }
      }
      j = {{"kind", "document_stats"},
           {"video_id", doc.video_id},
           {"duration_s", doc.duration_s},
           {"clips", doc.clips.size()},
           {"subsegments", subs},
           {"fine_pairs", fine},
           {"sentinels", sentinels},
           {"truncated_timelines", truncated},
           {"expected_calls", doc.clips.size() + 3 * subs + fine}};
    } else {
      throw InputError("stats needs --embeddings or --doc");
    }
    j["config"] = cfg.snapshot();
    const auto text = canonical_dump(j);
    if (!out_path.empty()) write_file_atomic(out_path, text);
    out_ << text;
    return 0;
  }

 private:
  static std::vector<VideoDocument> load_docs(const std::vector<std::string>& paths) {
    if (paths.empty()) throw InputError("at least one --doc is required");
    std::vector<VideoDocument> docs;
    for (const auto& p : paths) docs.push_back(load_document(p));
    std::vector<std::string> ids;
    for (const auto& d : docs) ids.push_back(d.video_id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InputError("duplicate video_id among documents");
    return docs;
  }

  static Json doc_ids(const std::vector<VideoDocument>& docs) {
    Json a = Json::array();
    for (const auto& d : docs) a.push_back(d.video_id);
    return a;
  }

  std::ostream& out_;
  std::ostream& err_;
  Environment env_;
};

std::vector<std::size_t> parse_k_list(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const auto item = std::string(text::trim(std::string_view(s).substr(pos, comma - pos)));
    char* end = nullptr;
    const auto v = std::strtoull(item.c_str(), &end, 10);
    if (item.empty() || end != item.c_str() + item.size() || v == 0) {
      throw InputError("--k expects positive integers separated by commas, got '" + s + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Environment env) {
  Runner runner(out, err, std::move(env));
  CLI::App app{"mmvir: multi-granular video representations for retrieval-augmented QA"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mmvir 0.1.0");

  Common common;
  std::string method, mode, overlap, k_text;
  double min_clip = 0, sub_max = 0, pq = 0, fine_fps = 0, primary_fps = 0, kts_penalty = 0;
  bool live = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file (overrides MMVIR_CONFIG)");
    sub->add_option("--set", common.sets, "Override any config key: KEY=VALUE (repeatable)");
    sub->add_option("--timings", common.timings, "Write stage wall-clock seconds to this file");
    sub->add_flag("--live", live, "Use the configured remote endpoints instead of the offline mocks");
  };
  auto add_seg = [&](CLI::App* sub) {
    sub->add_option("--method", method, "Segmentation method: percentile or kts");
    sub->add_option("--min-clip-s", min_clip, "Minimum clip duration in seconds");
    sub->add_option("--percentile", pq, "Similarity percentile for turning points");
    sub->add_option("--kts-penalty", kts_penalty, "KTS model-size penalty");
  };

  auto* seg_cmd = app.add_subcommand("segment", "Detect clip boundaries in an embedding series");
  std::string embeddings, out_path, frames, checkpoint, index_path, queries, results_path, gold_path, doc_path;
  std::vector<std::string> docs, latency_files;
  bool resume = false;
  add_common(seg_cmd);
  add_seg(seg_cmd);
  seg_cmd->add_option("embeddings", embeddings, "Embedding series file (text or binary)")->required();
  seg_cmd->add_option("-o,--out", out_path, "Boundaries output file")->required();

  auto* build_cmd = app.add_subcommand("build", "Build a video document from an embedding series");
  add_common(build_cmd);
  add_seg(build_cmd);
  build_cmd->add_option("embeddings", embeddings, "Embedding series file")->required();
  build_cmd->add_option("-o,--out", out_path, "Document output file")->required();
  build_cmd->add_option("--frames", frames, "Frame root directory");
  build_cmd->add_option("--sub-max-s", sub_max, "Sub-segment duration bound in seconds");
  build_cmd->add_option("--fine-fps", fine_fps, "Fine-grained sampling rate");
  build_cmd->add_option("--primary-fps", primary_fps, "Primary sampling rate (must match the series)");
  build_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path (default: <out>.ckpt)");
  build_cmd->add_flag("--resume", resume, "Continue from a matching checkpoint");

  auto* index_cmd = app.add_subcommand("index", "Embed timeline summaries into a retrieval index");
  add_common(index_cmd);
  index_cmd->add_option("--doc", docs, "Video document (repeatable)")->required();
  index_cmd->add_option("-o,--out", out_path, "Index output file")->required();

  auto* ask_cmd = app.add_subcommand("ask", "Answer a batch of questions");
  auto* locate_cmd = app.add_subcommand("locate", "Locate the clips matching a batch of queries");
  for (auto* sub : {ask_cmd, locate_cmd}) {
    add_common(sub);
    sub->add_option("--doc", docs, "Video document (repeatable)")->required();
    sub->add_option("--index", index_path, "Index file (built in memory when omitted)");
    sub->add_option("--queries", queries, "Query file: JSON lines or plain text lines")->required();
    sub->add_option("-o,--out", out_path, "Results output file")->required();
    sub->add_option("--k", k_text, "Clips to retrieve; a comma list runs a sweep, one file per value");
  }
  ask_cmd->add_option("--mode", mode, "Expansion mode: text_only, vision_only or hybrid");

  auto* sum_cmd = app.add_subcommand("summarize", "Summarize whole videos from their timelines");
  add_common(sum_cmd);
  sum_cmd->add_option("--doc", docs, "Video document (repeatable)")->required();
  sum_cmd->add_option("-o,--out", out_path, "Results output file")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score a results file against gold annotations");
  add_common(eval_cmd);
  eval_cmd->add_option("--results", results_path, "Results file from ask, summarize or locate")->required();
  eval_cmd->add_option("--gold", gold_path, "Gold JSON lines file")->required();
  eval_cmd->add_option("--k", k_text, "K values for Precision@K and Overlap@K (comma list)");
  eval_cmd->add_option("--overlap", overlap, "Overlap@K variant: recall or iou");
  eval_cmd->add_option("--latency", latency_files, "Timing files to include (repeatable)");
  eval_cmd->add_option("-o,--out", out_path, "Report output file");

  auto* stats_cmd = app.add_subcommand("stats", "Describe an embedding series or a document");
  add_common(stats_cmd);
  stats_cmd->add_option("--embeddings", embeddings, "Embedding series file");
  stats_cmd->add_option("--doc", doc_path, "Video document");
  stats_cmd->add_option("-o,--out", out_path, "Write the statistics here as well");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kInput);
  }

  try {
    auto& f = common.flags;
    auto set_num = [&](const char* key, CLI::App* sub, const char* opt, double v) {
      if (sub->count(opt)) f[key] = text::fixed6(v);
    };
    for (auto* sub : app.get_subcommands()) {
      if (sub->get_option_no_throw("--method") && sub->count("--method")) f["method"] = method;
      if (sub->get_option_no_throw("--min-clip-s")) set_num("min_clip_s", sub, "--min-clip-s", min_clip);
      if (sub->get_option_no_throw("--percentile")) set_num("percentile_q", sub, "--percentile", pq);
      if (sub->get_option_no_throw("--kts-penalty")) set_num("kts_penalty", sub, "--kts-penalty", kts_penalty);
      if (sub->get_option_no_throw("--sub-max-s")) set_num("sub_max_s", sub, "--sub-max-s", sub_max);
      if (sub->get_option_no_throw("--fine-fps")) set_num("fine_fps", sub, "--fine-fps", fine_fps);
      if (sub->get_option_no_throw("--primary-fps")) set_num("primary_fps", sub, "--primary-fps", primary_fps);
      if (sub->get_option_no_throw("--mode") && sub->count("--mode")) f["mode"] = mode;
      if (sub->get_option_no_throw("--overlap") && sub->count("--overlap")) f["overlap"] = overlap;
    }
    if (live) f["offline"] = "false";
    const auto ks = parse_k_list(k_text);
    if (ks.size() == 1 && !eval_cmd->parsed()) f["k"] = std::to_string(ks.front());

    if (seg_cmd->parsed()) return runner.segment(common, embeddings, out_path);
    if (build_cmd->parsed()) return runner.build(common, embeddings, out_path, frames, checkpoint, resume);
    if (index_cmd->parsed()) return runner.index(common, docs, out_path);
    if (ask_cmd->parsed()) {
      return runner.query_cmd(common, true, docs, index_path, queries, out_path, ks.size() > 1 ? ks : std::vector<std::size_t>{});
    }
    if (locate_cmd->parsed()) {
      return runner.query_cmd(common, false, docs, index_path, queries, out_path, ks.size() > 1 ? ks : std::vector<std::size_t>{});
    }
    if (sum_cmd->parsed()) return runner.summarize(common, docs, out_path);
    if (eval_cmd->parsed()) return runner.evaluate(common, results_path, gold_path, ks, latency_files, out_path);
    if (stats_cmd->parsed()) return runner.stats(common, embeddings, doc_path, out_path);
    err << "no subcommand\n";
    return static_cast<int>(ExitCode::kInput);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kInput);
  } catch (const GatewayError& e) {
    err << "gateway error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kGateway);
  } catch (const CaptionParseError& e) {
    err << "gateway error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kGateway);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kInternal);
  }
}

}  // namespace mmvir::cli
