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

#include "mmvir/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "mmvir/error.hpp"
#include "mmvir/text.hpp"

namespace mmvir::config {

std::string to_string(Source s) {
  switch (s) {
    case Source::kDefault:
      return "default";
    case Source::kFile:
      return "file";
    case Source::kEnv:
      return "env";
    case Source::kFlag:
      return "flag";
  }
  return "default";
}

const Layer& defaults() {
  static const Layer d = {
      // segmentation and build
      {"method", "percentile"},
      {"primary_fps", "0.5"},
      {"percentile_q", "2"},
      {"min_clip_s", "300"},
      {"sub_max_s", "100"},
      {"kts_penalty", "1"},
      {"kts_max_changepoints", ""},
      {"fine_fps", "0.05"},
      {"caption_parallelism", "4"},
      {"parse_retries", "2"},
      {"timeline_frame_cap", "64"},
      // query time
      {"k", "10"},
      {"mode", "hybrid"},
      {"overlap", "recall"},
      // gateway
      {"offline", "true"},
      {"embed_url", ""},
      {"caption_url", ""},
      {"answer_url", ""},
      {"protocol", "envelope"},
      {"embed_model", ""},
      {"caption_model", ""},
      {"answer_model", ""},
      {"timeout_s", "120"},
      {"max_retries", "3"},
      {"backoff_base_s", "1"},
      {"embed_dim", "128"},
      {"max_context_blocks", "4096"},
      {"frame_root", ""},
  };
  return d;
}

std::string env_name(const std::string& key) {
  std::string out = "MMVIR_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

Layer env_layer(const std::function<const char*(const char*)>& getenv) {
  Layer out;
  for (const auto& [key, _] : defaults()) {
    if (const char* v = getenv(env_name(key).c_str())) out[key] = v;
  }
  return out;
}

Layer file_layer(const Json& j) {
  if (!j.is_object()) throw InputError("config file: expected a JSON object");
  Layer out;
  for (const auto& [key, v] : j.items()) {
    if (v.is_string()) {
      out[key] = v.get<std::string>();
    } else if (v.is_boolean()) {
      out[key] = v.get<bool>() ? "true" : "false";
    } else if (v.is_number_integer()) {
      out[key] = std::to_string(v.get<long long>());
    } else if (v.is_number()) {
      out[key] = v.dump();
    } else if (v.is_null()) {
      out[key] = "";
    } else {
      throw InputError("config file: key '" + key + "' must be a string, number or boolean");
    }
  }
  return out;
}

Layer load_file_layer(const std::filesystem::path& path) {
  return file_layer(parse_json(read_file(path), "config file " + path.string()));
}

std::map<std::string, Resolved> resolve(const Layer& file, const Layer& env, const Layer& flags) {
  std::map<std::string, Resolved> out;
  for (const auto& [k, v] : defaults()) out[k] = {v, Source::kDefault};
  auto apply = [&](const Layer& layer, Source src) {
    for (const auto& [k, v] : layer) {
      auto it = out.find(k);
      if (it == out.end()) throw InputError("unknown config key '" + k + "' (from " + to_string(src) + ")");
      it->second = {v, src};
    }
  };
  apply(file, Source::kFile);
  apply(env, Source::kEnv);
  apply(flags, Source::kFlag);
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(const std::map<std::string, Resolved>& v) : v_(v) {}

  const std::string& raw(const std::string& key) const {
    const auto it = v_.find(key);
    if (it == v_.end()) throw InputError("config: missing key '" + key + "'");
    return it->second.value;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto& r = v_.at(key);
    throw InputError("config " + key + "='" + r.value + "' (from " + to_string(r.source) + "): " + what);
  }

  double number(const std::string& key) const {
    const auto s = std::string(text::trim(raw(key)));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) fail(key, "expected a number");
    return v;
  }

  long long integer(const std::string& key) const {
    const auto s = std::string(text::trim(raw(key)));
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) fail(key, "expected an integer");
    return v;
  }

  std::size_t count(const std::string& key) const {
    const auto v = integer(key);
    if (v < 0) fail(key, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key) const {
    const auto s = text::to_lower_ascii(text::trim(raw(key)));
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    fail(key, "expected a boolean");
  }

  template <typename F>
  auto parsed(const std::string& key, F fn) const {
    try {
      return fn(raw(key));
    } catch (const InputError& e) {
      fail(key, e.what());
    }
  }

 private:
  const std::map<std::string, Resolved>& v_;
};

}  // namespace

RunConfig RunConfig::from_resolved(const std::map<std::string, Resolved>& values) {
  Reader r(values);
  RunConfig c;
  auto& seg = c.build.segmentation;
  seg.method = r.parsed("method", seg::method_from_string);
  seg.percentile_q = r.number("percentile_q");
  seg.min_clip_s = r.number("min_clip_s");
  seg.sub_max_s = r.number("sub_max_s");
  seg.kts_penalty = r.number("kts_penalty");
  if (!text::trim(r.raw("kts_max_changepoints")).empty()) seg.kts_max_changepoints = r.count("kts_max_changepoints");
  c.build.primary_fps = r.number("primary_fps");
  c.build.fine_fps = r.number("fine_fps");
  c.build.caption_parallelism = r.count("caption_parallelism");
  c.build.parse_retries = static_cast<int>(r.integer("parse_retries"));
  c.build.timeline_frame_cap = r.count("timeline_frame_cap");

  c.k = r.count("k");
  if (c.k == 0) r.fail("k", "must be >= 1");
  c.mode = r.parsed("mode", retrieval::expand_mode_from_string);
  c.overlap = r.parsed("overlap", eval::overlap_mode_from_string);

  auto& g = c.gateway;
  g.offline = r.boolean("offline");
  g.embed_url = r.raw("embed_url");
  g.caption_url = r.raw("caption_url");
  g.answer_url = r.raw("answer_url");
  // Configuring endpoints without saying otherwise means live mode.
  const bool any_url = !g.embed_url.empty() || !g.caption_url.empty() || !g.answer_url.empty();
  if (any_url && values.at("offline").source == Source::kDefault) g.offline = false;
  const auto proto = r.raw("protocol");
  if (proto == "envelope") {
    g.protocol = gw::WireProtocol::kEnvelope;
  } else if (proto == "chat") {
    g.protocol = gw::WireProtocol::kChat;
  } else {
    r.fail("protocol", "expected envelope or chat");
  }
  g.embed_model = r.raw("embed_model");
  g.caption_model = r.raw("caption_model");
  g.answer_model = r.raw("answer_model");
  g.timeout_s = r.number("timeout_s");
  g.max_retries = static_cast<int>(r.integer("max_retries"));
  g.backoff_base_s = r.number("backoff_base_s");
  g.embed_dim = r.count("embed_dim");
  g.max_context_blocks = r.count("max_context_blocks");
  g.parallelism = c.build.caption_parallelism;
  g.frame_root = r.raw("frame_root");

  c.build.validate();
  g.validate();
  return c;
}

Json RunConfig::snapshot() const {
  auto gwj = gateway.to_json();
  gwj.erase("parallelism");
  return {{"build", build.snapshot()},
          {"gateway", gwj},
          {"k", k},
          {"mode", retrieval::to_string(mode)},
          {"overlap", eval::to_string(overlap)}};
}

RunConfig load_run_config(const Layer& file, const Layer& env, const Layer& flags) {
  return RunConfig::from_resolved(resolve(file, env, flags));
}

}  // namespace mmvir::config
