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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mmvir::text {

/// Splits on Unicode whitespace (ASCII whitespace, NBSP, U+2000..U+200A,
/// U+2028/2029, U+202F, U+205F, U+3000). Punctuation stays attached.
std::vector<std::string> split_words(std::string_view s);

inline std::size_t word_count(std::string_view s) { return split_words(s).size(); }

/// First `limit` words joined by single spaces.
std::string truncate_words(std::string_view s, std::size_t limit);

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);
std::string_view trim_right(std::string_view s);

/// Metric tokenization: lowercase, every ASCII punctuation character becomes
/// its own token, split on whitespace.
std::vector<std::string> metric_tokens(std::string_view s);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Fixed 6-decimal rendering used by every persisted format.
std::string fixed6(double v);

/// Round-trips `v` through its fixed6 rendering, so that a value stored in a
/// document is exactly what a reload produces.
double quantize6(double v);

}  // namespace mmvir::text
