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

// Layered run configuration.
//
// Every setting has a flat key (e.g. "min_clip_s"). Values come from four
// layers, highest first: command-line flag, environment variable
// MMVIR_<KEY> (upper-cased), config file (JSON object), built-in default.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmvir/builder.hpp"
#include "mmvir/canonical_json.hpp"
#include "mmvir/gateway.hpp"
#include "mmvir/metrics.hpp"
#include "mmvir/retrieval.hpp"

namespace mmvir::config {

using Layer = std::map<std::string, std::string>;

enum class Source { kDefault, kFile, kEnv, kFlag };
std::string to_string(Source s);

struct Resolved {
  std::string value;
  Source source = Source::kDefault;
};

/// Every known key with its default, as text.
const Layer& defaults();

/// Environment variable name for a key: "MMVIR_" + upper-cased key.
std::string env_name(const std::string& key);

/// Picks MMVIR_<KEY> for every known key from `getenv`.
Layer env_layer(const std::function<const char*(const char*)>& getenv);

/// Flat JSON object; numbers, booleans and strings are accepted.
Layer file_layer(const Json& j);
Layer load_file_layer(const std::filesystem::path& path);

/// Highest layer wins. Unknown keys in any layer raise InputError.
std::map<std::string, Resolved> resolve(const Layer& file, const Layer& env, const Layer& flags);

struct RunConfig {
  build::BuildConfig build;
  gw::GatewayConfig gateway;
  std::size_t k = 10;
  retrieval::ExpandMode mode = retrieval::ExpandMode::kHybrid;
  eval::OverlapMode overlap = eval::OverlapMode::kRecall;

  /// Typed view over resolved values; bad values raise InputError naming
  /// the key and its source.
  static RunConfig from_resolved(const std::map<std::string, Resolved>& values);
  /// Every setting that can influence outputs, written into result files.
  Json snapshot() const;
};

/// Convenience: resolve + from_resolved.
RunConfig load_run_config(const Layer& file, const Layer& env, const Layer& flags);

}  // namespace mmvir::config
