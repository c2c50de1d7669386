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

// Clients for the three model capabilities the pipeline needs: an embedder
// (text or frame -> unit vector), a captioner (frames + instruction -> text)
// and an answerer (context blocks + question -> text).
//
// Gateway wraps one client per capability and enforces the shared contract:
// preconditions, L2 normalisation of embeddings, trailing-whitespace trim of
// text, the context block limit, a parallelism bound and a call log. Offline
// mode swaps in deterministic mocks that need no network.

#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mmvir/canonical_json.hpp"

namespace mmvir::gw {

enum class Capability { kEmbed, kCaption, kAnswer };
std::string to_string(Capability c);

enum class EmbedKind { kText, kImage };

struct EmbedRequest {
  EmbedKind kind = EmbedKind::kText;
  std::string payload;  // text, or a frame locator for kImage
  std::string model_hint;
  std::string tag;  // call-log label only; never sent
};

struct EmbedResponse {
  std::vector<double> vector;
  std::size_t dim = 0;
};

struct CaptionRequest {
  std::vector<std::string> frames;  // ordered frame locators
  std::string prompt;
  int max_tokens = 512;
  std::string tag;
};

struct CaptionResponse {
  std::string text;
};

struct ContextBlock {
  enum class Kind { kText, kFrame };
  Kind kind = Kind::kText;
  std::string content;  // text, or a frame locator

  static ContextBlock text(std::string s) { return {Kind::kText, std::move(s)}; }
  static ContextBlock frame(std::string s) { return {Kind::kFrame, std::move(s)}; }
  bool operator==(const ContextBlock&) const = default;
};

struct AnswerRequest {
  std::vector<ContextBlock> context;
  std::string question;
  std::vector<std::string> options;  // option texts; labels are A, B, C, ... by position
  std::string tag;
};

struct AnswerResponse {
  std::string text;
};

/// Label for option index i: "A", "B", ...
std::string option_label(std::size_t i);

enum class WireProtocol { kEnvelope, kChat };

struct GatewayConfig {
  bool offline = true;
  std::string embed_url;
  std::string caption_url;
  std::string answer_url;
  std::string token_env = "MMVIR_API_TOKEN";
  WireProtocol protocol = WireProtocol::kEnvelope;
  std::string embed_model;
  std::string caption_model;
  std::string answer_model;
  double timeout_s = 120.0;
  int max_retries = 3;
  double backoff_base_s = 1.0;
  std::size_t embed_dim = 128;
  std::size_t max_context_blocks = 4096;
  std::size_t parallelism = 4;
  /// Directory holding the frame files named by locators. Live mode checks
  /// that every captioned frame exists under it.
  std::string frame_root;

  /// offline=true with endpoints set, or offline=false with one missing,
  /// raises InputError.
  void validate() const;
  Json to_json() const;
};

// --- capability interfaces ------------------------------------------------

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbedResponse embed(const EmbedRequest& req) = 0;
  /// Identifies the embedding space; indexes built with different
  /// fingerprints cannot be merged.
  virtual std::string fingerprint() const = 0;
};

class Captioner {
 public:
  virtual ~Captioner() = default;
  virtual CaptionResponse caption(const CaptionRequest& req) = 0;
  virtual std::string identity() const = 0;
};

class Answerer {
 public:
  virtual ~Answerer() = default;
  virtual AnswerResponse answer(const AnswerRequest& req) = 0;
  virtual std::string identity() const = 0;
};

// --- offline mocks ------------------------------------------------------------

/// Bag-of-tokens hashing embedder: whitespace split, lowercase, FNV-1a of each
/// token modulo `dim` accumulates +1, then L2 normalisation. Images hash their
/// locator string the same way.
class MockEmbedder final : public Embedder {
 public:
  explicit MockEmbedder(std::size_t dim = 128) : dim_(dim) {}
  EmbedResponse embed(const EmbedRequest& req) override;
  std::string fingerprint() const override;

 private:
  std::size_t dim_;
};

/// Produces canned, well-formed output for each known prompt, seeded by a
/// hash of the prompt and the frame locators.
class MockCaptioner final : public Captioner {
 public:
  CaptionResponse caption(const CaptionRequest& req) override;
  std::string identity() const override { return "offline-mock-captioner/v1"; }
};

/// With options: the label of the option whose mock embedding is closest to
/// the embedding of all text blocks concatenated. Without: an extractive
/// digest of the text blocks.
class MockAnswerer final : public Answerer {
 public:
  explicit MockAnswerer(std::size_t dim = 128) : embedder_(dim) {}
  AnswerResponse answer(const AnswerRequest& req) override;
  std::string identity() const override { return "offline-mock-answerer/v1"; }

 private:
  MockEmbedder embedder_;
};

// --- remote clients -------------------------------------------------------------

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Connection-level failure (refused, reset, timed out).
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            double timeout_s) = 0;
};

/// cpp-httplib backed transport.
std::shared_ptr<Transport> make_http_transport();

using Sleeper = std::function<void(double seconds)>;
Sleeper real_sleeper();

/// One HTTP endpoint plus the retry policy. Retries transport failures,
/// HTTP 429 and 5xx, and envelope errors marked retryable; waits
/// backoff_base_s * 2^(attempt-1) between attempts; gives up after
/// max_retries + 1 attempts.
class RemoteEndpoint {
 public:
  RemoteEndpoint(std::string url, Capability cap, const GatewayConfig& cfg,
                 std::shared_ptr<Transport> transport, Sleeper sleeper);

  struct Outcome {
    Json result;
    int attempts = 0;
  };

  /// Envelope protocol: wraps `payload` as
  /// {capability, version, request_id, payload} and unwraps {ok, result|error}.
  Outcome call_envelope(const Json& payload);
  /// Chat protocol: posts `body` as-is and returns the parsed response body.
  Outcome call_raw(const Json& body);

  const std::string& url() const { return url_; }

 private:
  Outcome call(const Json& body, bool envelope, const std::string& request_id);

  std::string url_;
  Capability cap_;
  GatewayConfig cfg_;
  std::shared_ptr<Transport> transport_;
  Sleeper sleeper_;
  std::atomic<std::uint64_t> next_id_{1};
};

class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(const GatewayConfig& cfg, std::shared_ptr<Transport> t, Sleeper s);
  EmbedResponse embed(const EmbedRequest& req) override;
  std::string fingerprint() const override;
  int last_attempts() const { return last_attempts_; }

 private:
  GatewayConfig cfg_;
  RemoteEndpoint ep_;
  std::atomic<int> last_attempts_{0};
};

class RemoteCaptioner final : public Captioner {
 public:
  RemoteCaptioner(const GatewayConfig& cfg, std::shared_ptr<Transport> t, Sleeper s);
  CaptionResponse caption(const CaptionRequest& req) override;
  std::string identity() const override;

 private:
  GatewayConfig cfg_;
  RemoteEndpoint ep_;
};

class RemoteAnswerer final : public Answerer {
 public:
  RemoteAnswerer(const GatewayConfig& cfg, std::shared_ptr<Transport> t, Sleeper s);
  AnswerResponse answer(const AnswerRequest& req) override;
  std::string identity() const override;

 private:
  GatewayConfig cfg_;
  RemoteEndpoint ep_;
};

// --- call log ---------------------------------------------------------------------

struct CallRecord {
  Capability capability;
  std::string tag;
  bool ok = true;
};

class CallLog {
 public:
  void add(CallRecord r);
  std::vector<CallRecord> snapshot() const;
  std::size_t count(Capability c) const;
  std::size_t count(Capability c, const std::string& tag) const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::vector<CallRecord> records_;
};

// --- gateway -------------------------------------------------------------------------

class Gateway {
 public:
  Gateway(std::unique_ptr<Embedder> e, std::unique_ptr<Captioner> c, std::unique_ptr<Answerer> a,
          GatewayConfig cfg);

  static std::unique_ptr<Gateway> offline(GatewayConfig cfg = {});
  static std::unique_ptr<Gateway> remote(GatewayConfig cfg,
                                         std::shared_ptr<Transport> transport = nullptr,
                                         Sleeper sleeper = nullptr);
  /// offline() or remote() depending on cfg.offline.
  static std::unique_ptr<Gateway> from_config(GatewayConfig cfg);

  EmbedResponse embed(const EmbedRequest& req);
  CaptionResponse caption(const CaptionRequest& req);
  AnswerResponse answer(const AnswerRequest& req);

  std::string embedder_fingerprint() const { return embedder_->fingerprint(); }
  std::string captioner_identity() const { return captioner_->identity(); }
  std::string answerer_identity() const { return answerer_->identity(); }
  const GatewayConfig& config() const { return cfg_; }
  CallLog& log() { return log_; }
  const CallLog& log() const { return log_; }

 private:
  class Slot;

  std::unique_ptr<Embedder> embedder_;
  std::unique_ptr<Captioner> captioner_;
  std::unique_ptr<Answerer> answerer_;
  GatewayConfig cfg_;
  CallLog log_;
  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;
};

}  // namespace mmvir::gw
