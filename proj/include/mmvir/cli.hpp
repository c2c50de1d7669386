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

// The `mmvir` command line, as a library entry point so tests can drive it
// without spawning processes.

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mmvir/canonical_json.hpp"
#include "mmvir/gateway.hpp"

namespace mmvir::cli {

struct Environment {
  /// Environment lookup; defaults to std::getenv.
  std::function<const char*(const char*)> getenv;
  /// Gateway construction; defaults to Gateway::from_config.
  std::function<std::unique_ptr<gw::Gateway>(const gw::GatewayConfig&)> make_gateway;
};

/// Runs one command line (args exclude the program name) and returns the
/// process exit code: 0 ok, 1 internal error, 2 input or config error,
/// 3 gateway failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Environment env = {});

// --- file formats shared by subcommands ---------------------------------------

struct Query {
  std::string id;
  std::string text;
  std::vector<std::string> options;
};

struct QueryFile {
  std::vector<Query> queries;
  std::vector<std::pair<std::size_t, std::string>> errors;  // (1-based line, message)
};

/// One query per line: either a JSON object {"id", "question" | "query",
/// "options"} or plain text (id = line number). Blank lines and lines
/// starting with '#' are skipped. Bad lines are collected, not thrown.
QueryFile parse_query_file(std::string_view text);

struct BoundaryFile {
  std::string video_id;
  double duration_s = 0.0;
  std::string method;
  std::vector<double> boundaries;
};

Json boundaries_to_json(const BoundaryFile& b, const Json& config, const Json& signal_report);
BoundaryFile boundaries_from_json(const Json& j);

/// "out.json" with k=5 becomes "out.k5.json".
std::string k_suffixed(const std::string& path, std::size_t k);

}  // namespace mmvir::cli
