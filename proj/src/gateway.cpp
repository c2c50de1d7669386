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

#include "mmvir/gateway.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>

#include "mmvir/document.hpp"
#include "mmvir/error.hpp"
#include "mmvir/prompts.hpp"
#include "mmvir/text.hpp"

namespace mmvir::gw {

std::string to_string(Capability c) {
  switch (c) {
    case Capability::kEmbed:
      return "embed";
    case Capability::kCaption:
      return "caption";
    case Capability::kAnswer:
      return "answer";
  }
  return "unknown";
}

std::string option_label(std::size_t i) {
  std::string out;
  ++i;
  while (i > 0) {
    --i;
    out.insert(out.begin(), static_cast<char>('A' + i % 26));
    i /= 26;
  }
  return out;
}

void GatewayConfig::validate() const {
  const bool any = !embed_url.empty() || !caption_url.empty() || !answer_url.empty();
  if (offline && any) throw InputError("gateway: offline mode must not configure endpoints");
  if (!offline && (embed_url.empty() || caption_url.empty() || answer_url.empty())) {
    throw InputError("gateway: live mode needs embed, caption and answer endpoints");
  }
  if (max_retries < 0) throw InputError("gateway: max_retries must be >= 0");
  if (!(timeout_s > 0.0)) throw InputError("gateway: timeout_s must be > 0");
  if (embed_dim == 0) throw InputError("gateway: embed_dim must be > 0");
  if (parallelism == 0) throw InputError("gateway: parallelism must be > 0");
}

Json GatewayConfig::to_json() const {
  return {{"offline", offline},
          {"embed_url", embed_url},
          {"caption_url", caption_url},
          {"answer_url", answer_url},
          {"protocol", protocol == WireProtocol::kChat ? "chat" : "envelope"},
          {"embed_model", embed_model},
          {"caption_model", caption_model},
          {"answer_model", answer_model},
          {"timeout_s", timeout_s},
          {"max_retries", max_retries},
          {"backoff_base_s", backoff_base_s},
          {"embed_dim", embed_dim},
          {"max_context_blocks", max_context_blocks},
          {"parallelism", parallelism},
          {"frame_root", frame_root}};
}

// --- mocks ----------------------------------------------------------------------

EmbedResponse MockEmbedder::embed(const EmbedRequest& req) {
  std::vector<double> v(dim_, 0.0);
  const auto tokens = req.kind == EmbedKind::kImage ? std::vector<std::string>{req.payload}
                                                    : text::split_words(req.payload);
  for (const auto& tok : tokens) v[text::fnv1a(text::to_lower_ascii(tok)) % dim_] += 1.0;
  return {std::move(v), dim_};
}

std::string MockEmbedder::fingerprint() const {
  return "offline-mock-hash/v1/d" + std::to_string(dim_);
}

namespace {

/// splitmix64; fully specified, so mock output is identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  template <std::size_t N>
  std::string_view pick(const std::array<std::string_view, N>& a) {
    return a[next() % N];
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t s_;
};

constexpr std::array<std::string_view, 12> kWho = {
    "a man", "a woman", "the camera wearer", "a child", "two friends", "a chef",
    "an elderly person", "a mechanic", "a student", "a gardener", "a shopkeeper", "a painter"};
constexpr std::array<std::string_view, 20> kVerbs = {
    "chopping", "washing", "carrying", "repairing", "painting", "folding", "sorting",
    "stirring", "sweeping", "assembling", "measuring", "watering", "reading", "packing",
    "polishing", "unloading", "arranging", "inspecting", "cutting", "mixing"};
constexpr std::array<std::string_view, 24> kThings = {
    "vegetables", "dishes", "boxes", "bicycle", "fence", "laundry", "tools", "soup",
    "floor", "shelf", "fabric", "plants", "newspaper", "groceries", "shoes", "engine",
    "flowers", "letters", "cupboard", "dough", "kettle", "lamp", "carpet", "bottles"};
constexpr std::array<std::string_view, 14> kPlaces = {
    "kitchen", "garage", "garden", "living room", "workshop", "street", "market",
    "bedroom", "office", "backyard", "laundry room", "classroom", "store", "balcony"};
constexpr std::array<std::string_view, 10> kGoals = {
    "prepare dinner", "tidy up", "fix a leak", "get ready for guests", "finish a project",
    "restock supplies", "clean the house", "practice a skill", "pack for a trip", "sell goods"};
constexpr std::array<std::string_view, 12> kColors = {
    "red", "blue", "green", "yellow", "gray", "white", "black", "brown", "silver", "wooden",
    "striped", "shiny"};
constexpr std::array<std::string_view, 8> kRelations = {
    "on the table", "next to the sink", "under the shelf", "left of the door",
    "right of the window", "behind the chair", "in front of the person", "near the wall"};

std::string mock_timeline(Rng& r) {
  std::string s;
  s += std::string(r.pick(kWho)) + " is " + std::string(r.pick(kVerbs)) + " " +
       std::string(r.pick(kThings)) + " in the " + std::string(r.pick(kPlaces)) + " to " +
       std::string(r.pick(kGoals)) + ", then " + std::string(r.pick(kWho)) + " starts " +
       std::string(r.pick(kVerbs)) + " " + std::string(r.pick(kThings)) + " near the " +
       std::string(r.pick(kThings)) + ".";
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

// Record lists are emitted in the loose single-quoted style the instructions
// show, so the tolerant parser sees realistic input in offline runs.
std::string mock_actions(Rng& r) {
  std::string s = "[";
  const auto n = 1 + r.below(3);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ", ";
    s += "{'action description': " + std::string(r.pick(kVerbs)) + " the " +
         std::string(r.pick(kThings)) + "}";
  }
  return s + "]";
}

std::string mock_scenes(Rng& r) {
  std::string s = "[";
  const auto n = 1 + r.below(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ", ";
    const auto who = std::string(r.pick(kWho));
    const auto verb = std::string(r.pick(kVerbs));
    const auto thing = std::string(r.pick(kThings));
    const auto place = std::string(r.pick(kPlaces));
    s += "{'description': " + who + " is " + verb + " " + thing + " in the " + place +
         ", 'setting': " + place + ", 'action': " + verb + "}";
  }
  return s + "]";
}

std::string mock_objects(Rng& r) {
  std::string s = "[";
  const auto n = 1 + r.below(3);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ", ";
    s += "{'object_name': " + std::string(r.pick(kThings)) +
         ", 'number': " + std::to_string(1 + r.below(4));
    if (r.below(2) == 0) {
      s += ", 'attributes': " + std::string(r.pick(kColors)) + ", " + std::string(r.pick(kColors));
    }
    s += "}";
  }
  return s + "]";
}

std::string mock_spatial(Rng& r) {
  std::string s = "[";
  const auto n = 1 + r.below(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ", ";
    s += "{'object_name': " + std::string(r.pick(kThings)) +
         ", 'number': " + std::to_string(1 + r.below(3)) +
         ", 'attributes': " + std::string(r.pick(kColors)) + ", 'spatial_relationship': [" +
         std::string(r.pick(kRelations)) + ", " + std::string(r.pick(kRelations)) + "]}";
  }
  return s + "]";
}

}  // namespace

CaptionResponse MockCaptioner::caption(const CaptionRequest& req) {
  std::uint64_t seed = text::fnv1a(req.prompt);
  for (const auto& f : req.frames) seed = text::fnv1a(f, seed ^ 0x5bd1e995ULL);
  Rng r(seed);
  const auto id = prompts::identify(req.prompt);
  if (!id) return {"A short free-form description of " + std::to_string(req.frames.size()) + " frames."};
  // One request in 16 reports nothing, exercising the sentinel paths.
  const bool empty = r.below(16) == 0;
  switch (*id) {
    case prompts::PromptId::kTimeline:
      return {mock_timeline(r)};
    case prompts::PromptId::kAction:
      return {empty ? std::string(prompts::kNoActionSentinel) : mock_actions(r)};
    case prompts::PromptId::kScene:
      return {empty ? std::string(prompts::kNoActionSentinel) : mock_scenes(r)};
    case prompts::PromptId::kObject:
      return {empty ? std::string(prompts::kNoObjectSentinel) : mock_objects(r)};
    case prompts::PromptId::kSpatial:
      return {empty ? std::string(prompts::kNoObjectSentinel) : mock_spatial(r)};
  }
  return {"unreachable"};
}

namespace {

std::vector<double> normalized(std::vector<double> v) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  const double n = std::sqrt(ss);
  if (n > 0.0) {
    for (auto& x : v) x /= n;
  }
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

AnswerResponse MockAnswerer::answer(const AnswerRequest& req) {
  std::string joined;
  for (const auto& b : req.context) {
    if (b.kind != ContextBlock::Kind::kText) continue;
    if (!joined.empty()) joined.push_back(' ');
    joined += b.content;
  }
  if (!req.options.empty()) {
    const auto ctx = normalized(embedder_.embed({EmbedKind::kText, joined, "", ""}).vector);
    std::size_t best = 0;
    double best_score = -2.0;
    for (std::size_t i = 0; i < req.options.size(); ++i) {
      const auto opt = normalized(embedder_.embed({EmbedKind::kText, req.options[i], "", ""}).vector);
      const double s = dot(ctx, opt);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    return {option_label(best)};
  }
  if (joined.empty()) return {"No textual context was provided."};
  return {"Summary: " + text::truncate_words(joined, 120)};
}

// --- call log --------------------------------------------------------------------

void CallLog::add(CallRecord r) {
  std::lock_guard lock(mu_);
  records_.push_back(std::move(r));
}

std::vector<CallRecord> CallLog::snapshot() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t CallLog::count(Capability c) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(
      records_.begin(), records_.end(), [&](const CallRecord& r) { return r.capability == c; }));
}

std::size_t CallLog::count(Capability c, const std::string& tag) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [&](const CallRecord& r) {
    return r.capability == c && r.tag == tag;
  }));
}

void CallLog::clear() {
  std::lock_guard lock(mu_);
  records_.clear();
}

// --- gateway ---------------------------------------------------------------------------

class Gateway::Slot {
 public:
  explicit Slot(Gateway& g) : g_(g) {
    std::unique_lock lock(g_.slot_mu_);
    g_.slot_cv_.wait(lock, [&] { return g_.in_flight_ < g_.cfg_.parallelism; });
    ++g_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(g_.slot_mu_);
      --g_.in_flight_;
    }
    g_.slot_cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  Gateway& g_;
};

Gateway::Gateway(std::unique_ptr<Embedder> e, std::unique_ptr<Captioner> c,
                 std::unique_ptr<Answerer> a, GatewayConfig cfg)
    : embedder_(std::move(e)), captioner_(std::move(c)), answerer_(std::move(a)), cfg_(std::move(cfg)) {
  if (cfg_.parallelism == 0) cfg_.parallelism = 1;
}

std::unique_ptr<Gateway> Gateway::offline(GatewayConfig cfg) {
  cfg.offline = true;
  cfg.validate();
  const auto d = cfg.embed_dim;
  return std::make_unique<Gateway>(std::make_unique<MockEmbedder>(d), std::make_unique<MockCaptioner>(),
                                   std::make_unique<MockAnswerer>(d), std::move(cfg));
}

std::unique_ptr<Gateway> Gateway::remote(GatewayConfig cfg, std::shared_ptr<Transport> transport,
                                         Sleeper sleeper) {
  cfg.offline = false;
  cfg.validate();
  if (!transport) transport = make_http_transport();
  if (!sleeper) sleeper = real_sleeper();
  auto e = std::make_unique<RemoteEmbedder>(cfg, transport, sleeper);
  auto c = std::make_unique<RemoteCaptioner>(cfg, transport, sleeper);
  auto a = std::make_unique<RemoteAnswerer>(cfg, transport, sleeper);
  return std::make_unique<Gateway>(std::move(e), std::move(c), std::move(a), std::move(cfg));
}

std::unique_ptr<Gateway> Gateway::from_config(GatewayConfig cfg) {
  return cfg.offline ? offline(std::move(cfg)) : remote(std::move(cfg));
}

namespace {

template <typename F>
auto logged(CallLog& log, Capability cap, const std::string& tag, F&& f) {
  try {
    auto out = f();
    log.add({cap, tag, true});
    return out;
  } catch (...) {
    log.add({cap, tag, false});
    throw;
  }
}

}  // namespace

EmbedResponse Gateway::embed(const EmbedRequest& req) {
  if (text::trim(req.payload).empty()) throw InputError("embed: payload must be non-empty");
  Slot slot(*this);
  return logged(log_, Capability::kEmbed, req.tag, [&] {
    auto resp = embedder_->embed(req);
    if (resp.vector.size() != cfg_.embed_dim) {
      throw GatewayError("embed: dimension mismatch, expected " + std::to_string(cfg_.embed_dim) +
                         " got " + std::to_string(resp.vector.size()));
    }
    double ss = 0.0;
    for (double x : resp.vector) ss += x * x;
    if (!(ss > 0.0) || !std::isfinite(ss)) throw GatewayError("embed: zero or non-finite vector");
    resp.vector = normalized(std::move(resp.vector));
    resp.dim = resp.vector.size();
    return resp;
  });
}

CaptionResponse Gateway::caption(const CaptionRequest& req) {
  if (req.frames.empty()) throw InputError("caption: at least one frame is required");
  if (cfg_.offline) {
    for (const auto& f : req.frames) {
      if (!is_valid_locator(f)) throw InputError("caption: malformed frame locator '" + f + "'");
    }
  } else if (!cfg_.frame_root.empty()) {
    for (const auto& f : req.frames) {
      if (!std::filesystem::is_regular_file(std::filesystem::path(cfg_.frame_root) / f)) {
        throw InputError("caption: frame '" + f + "' not found under " + cfg_.frame_root);
      }
    }
  }
  Slot slot(*this);
  return logged(log_, Capability::kCaption, req.tag, [&] {
    auto resp = captioner_->caption(req);
    resp.text = std::string(text::trim_right(resp.text));
    if (resp.text.empty()) throw GatewayError("caption: service returned empty text");
    return resp;
  });
}

AnswerResponse Gateway::answer(const AnswerRequest& req) {
  if (text::trim(req.question).empty()) throw InputError("answer: question must be non-empty");
  if (req.context.size() > cfg_.max_context_blocks) {
    throw InputError("answer: context has " + std::to_string(req.context.size()) +
                     " blocks, limit is " + std::to_string(cfg_.max_context_blocks));
  }
  Slot slot(*this);
  return logged(log_, Capability::kAnswer, req.tag, [&] {
    auto resp = answerer_->answer(req);
    resp.text = std::string(text::trim_right(resp.text));
    return resp;
  });
}

}  // namespace mmvir::gw
