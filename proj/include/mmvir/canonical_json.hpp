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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace mmvir {

using Json = nlohmann::json;

/// Canonical text form: sorted keys, two-space indent, every floating-point
/// number in fixed 6-decimal notation, trailing newline. Two calls on equal
/// values always produce identical bytes.
std::string canonical_dump(const Json& j);

/// Parses JSON text; failures raise ParseError carrying the byte offset.
Json parse_json(std::string_view text, std::string_view what);

std::string read_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never observe a
/// half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mmvir
