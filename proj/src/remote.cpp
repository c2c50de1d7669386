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

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "mmvir/error.hpp"
#include "mmvir/gateway.hpp"

namespace mmvir::gw {
namespace {

constexpr int kWireVersion = 1;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InputError("gateway: URL without scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public Transport {
 public:
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers,
                    double timeout_s) override {
    const auto parts = split_url(url);
    httplib::Client cli(parts.origin);
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = cli.Post(parts.path, h, body, "application/json");
    if (!res) throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }
};

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::string bearer_token(const GatewayConfig& cfg) {
  if (cfg.token_env.empty()) return {};
  const char* v = std::getenv(cfg.token_env.c_str());
  return v ? std::string(v) : std::string();
}

}  // namespace

std::shared_ptr<Transport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

Sleeper real_sleeper() {
  return [](double s) {
    if (s > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(s));
  };
}

RemoteEndpoint::RemoteEndpoint(std::string url, Capability cap, const GatewayConfig& cfg,
                               std::shared_ptr<Transport> transport, Sleeper sleeper)
    : url_(std::move(url)), cap_(cap), cfg_(cfg), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {}

RemoteEndpoint::Outcome RemoteEndpoint::call_envelope(const Json& payload) {
  const auto id = to_string(cap_) + "-" + std::to_string(next_id_.fetch_add(1));
  Json body = {{"capability", to_string(cap_)},
               {"version", kWireVersion},
               {"request_id", id},
               {"payload", payload}};
  return call(body, true, id);
}

RemoteEndpoint::Outcome RemoteEndpoint::call_raw(const Json& body) { return call(body, false, ""); }

RemoteEndpoint::Outcome RemoteEndpoint::call(const Json& body, bool envelope,
                                             const std::string& request_id) {
  const auto wire = body.dump();
  std::vector<std::pair<std::string, std::string>> headers;
  if (const auto tok = bearer_token(cfg_); !tok.empty()) headers.emplace_back("Authorization", "Bearer " + tok);
  if (!request_id.empty()) headers.emplace_back("X-Request-Id", request_id);

  const int max_attempts = cfg_.max_retries + 1;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) sleeper_(cfg_.backoff_base_s * std::pow(2.0, attempt - 2));
    HttpResponse resp;
    try {
      resp = transport_->post(url_, wire, headers, cfg_.timeout_s);
    } catch (const TransportError& e) {
      last_error = e.what();
      continue;
    }
    if (retryable_status(resp.status)) {
      last_error = "HTTP " + std::to_string(resp.status);
      continue;
    }
    if (resp.status < 200 || resp.status >= 300) {
      throw GatewayError(to_string(cap_) + ": HTTP " + std::to_string(resp.status) + " from " + url_);
    }
    Json parsed;
    try {
      parsed = Json::parse(resp.body);
    } catch (const Json::parse_error& e) {
      throw GatewayError(to_string(cap_) + ": malformed response body: " + e.what());
    }
    if (!envelope) return {std::move(parsed), attempt};
    if (!parsed.is_object() || !parsed.contains("ok")) {
      throw GatewayError(to_string(cap_) + ": response is not an envelope");
    }
    if (parsed.value("request_id", std::string()) != request_id) {
      throw GatewayError(to_string(cap_) + ": correlation id mismatch (sent " + request_id + ")");
    }
    if (parsed.at("ok").get<bool>()) return {parsed.value("result", Json::object()), attempt};
    const auto err = parsed.value("error", Json::object());
    last_error = err.value("message", std::string("service error"));
    if (!err.value("retryable", false)) {
      throw GatewayError(to_string(cap_) + ": service error: " + last_error);
    }
  }
  throw GatewayError(to_string(cap_) + ": giving up after " + std::to_string(max_attempts) +
                     " attempts: " + last_error);
}

// --- capability clients --------------------------------------------------------

namespace {

Json chat_user_message(const std::string& textual, const std::vector<std::string>& frames) {
  Json content = Json::array();
  content.push_back({{"type", "text"}, {"text", textual}});
  for (const auto& f : frames) content.push_back({{"type", "image_url"}, {"image_url", {{"url", f}}}});
  return Json::array({{{"role", "user"}, {"content", content}}});
}

std::string chat_text(const Json& r) {
  try {
    return r.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw GatewayError(std::string("chat response without choices[0].message.content: ") + e.what());
  }
}

}  // namespace

RemoteEmbedder::RemoteEmbedder(const GatewayConfig& cfg, std::shared_ptr<Transport> t, Sleeper s)
    : cfg_(cfg), ep_(cfg.embed_url, Capability::kEmbed, cfg, std::move(t), std::move(s)) {}

EmbedResponse RemoteEmbedder::embed(const EmbedRequest& req) {
  const std::string hint = req.model_hint.empty() ? cfg_.embed_model : req.model_hint;
  std::vector<double> v;
  if (cfg_.protocol == WireProtocol::kChat) {
    auto out = ep_.call_raw({{"model", hint}, {"input", req.payload}});
    last_attempts_ = out.attempts;
    try {
      v = out.result.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const Json::exception& e) {
      throw GatewayError(std::string("embedding response malformed: ") + e.what());
    }
  } else {
    auto out = ep_.call_envelope({{"kind", req.kind == EmbedKind::kImage ? "image" : "text"},
                                  {"payload", req.payload},
                                  {"model_hint", hint}});
    last_attempts_ = out.attempts;
    try {
      v = out.result.at("vector").get<std::vector<double>>();
    } catch (const Json::exception& e) {
      throw GatewayError(std::string("embed result malformed: ") + e.what());
    }
  }
  return {v, v.size()};
}

std::string RemoteEmbedder::fingerprint() const {
  return "remote:" + ep_.url() + "|" + cfg_.embed_model + "|d" + std::to_string(cfg_.embed_dim);
}

RemoteCaptioner::RemoteCaptioner(const GatewayConfig& cfg, std::shared_ptr<Transport> t, Sleeper s)
    : cfg_(cfg), ep_(cfg.caption_url, Capability::kCaption, cfg, std::move(t), std::move(s)) {}

CaptionResponse RemoteCaptioner::caption(const CaptionRequest& req) {
  if (cfg_.protocol == WireProtocol::kChat) {
    auto out = ep_.call_raw({{"model", cfg_.caption_model},
                             {"max_tokens", req.max_tokens},
                             {"messages", chat_user_message(req.prompt, req.frames)}});
    return {chat_text(out.result)};
  }
  auto out = ep_.call_envelope({{"frames", req.frames}, {"prompt", req.prompt}, {"max_tokens", req.max_tokens}});
  if (!out.result.contains("text") || !out.result["text"].is_string()) {
    throw GatewayError("caption result without text");
  }
  return {out.result["text"].get<std::string>()};
}

std::string RemoteCaptioner::identity() const { return "remote:" + ep_.url() + "|" + cfg_.caption_model; }

RemoteAnswerer::RemoteAnswerer(const GatewayConfig& cfg, std::shared_ptr<Transport> t, Sleeper s)
    : cfg_(cfg), ep_(cfg.answer_url, Capability::kAnswer, cfg, std::move(t), std::move(s)) {}

AnswerResponse RemoteAnswerer::answer(const AnswerRequest& req) {
  if (cfg_.protocol == WireProtocol::kChat) {
    Json content = Json::array();
    for (const auto& b : req.context) {
      if (b.kind == ContextBlock::Kind::kText) {
        content.push_back({{"type", "text"}, {"text", b.content}});
      } else {
        content.push_back({{"type", "image_url"}, {"image_url", {{"url", b.content}}}});
      }
    }
    std::string q = req.question;
    for (std::size_t i = 0; i < req.options.size(); ++i) q += "\n" + option_label(i) + ". " + req.options[i];
    content.push_back({{"type", "text"}, {"text", q}});
    auto out = ep_.call_raw({{"model", cfg_.answer_model},
                             {"messages", Json::array({{{"role", "user"}, {"content", content}}})}});
    return {chat_text(out.result)};
  }
  Json ctx = Json::array();
  for (const auto& b : req.context) {
    ctx.push_back({{"type", b.kind == ContextBlock::Kind::kText ? "text" : "frame"}, {"content", b.content}});
  }
  Json opts = Json::array();
  for (std::size_t i = 0; i < req.options.size(); ++i) {
    opts.push_back({{"label", option_label(i)}, {"text", req.options[i]}});
  }
  auto out = ep_.call_envelope({{"context", ctx}, {"question", req.question}, {"options", opts}});
  if (!out.result.contains("text") || !out.result["text"].is_string()) {
    throw GatewayError("answer result without text");
  }
  return {out.result["text"].get<std::string>()};
}

std::string RemoteAnswerer::identity() const { return "remote:" + ep_.url() + "|" + cfg_.answer_model; }

}  // namespace mmvir::gw
