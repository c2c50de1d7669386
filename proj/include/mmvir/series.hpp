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
#include <span>
#include <string>
#include <vector>

namespace mmvir {

/// Timestamped unit-norm frame embeddings sampled at `fps`.
///
/// Rows are stored contiguously: row i occupies vectors[i*dim, (i+1)*dim).
struct FrameEmbeddingSeries {
  std::string video_id;
  double fps = 0.5;
  std::size_t dim = 0;
  std::vector<double> timestamps;
  std::vector<double> vectors;

  std::size_t size() const { return timestamps.size(); }
  std::span<const double> row(std::size_t i) const {
    return {vectors.data() + i * dim, dim};
  }
  /// Video length T: one frame period past the last sample.
  double duration() const;

  /// Throws InputError unless n >= 2, timestamps strictly increasing, and
  /// every row has L2 norm 1 +/- 1e-6.
  void validate() const;
};

/// Scales every row to unit length. Throws InputError on a zero row.
void normalize_rows(FrameEmbeddingSeries& series);

// Embedding series files.
//
// Text form:
//   # comment lines allowed
//   <n> <d> <fps> <video_id>
//   <timestamp> <v_1> ... <v_d>        (n rows)
//
// Binary form (little-endian):
//   "MVES" | u8 version(=1) | u32 n | u32 d | f64 fps | u16 id_len | id bytes
//   then n records of f64 timestamp followed by d f32 values.
//
// The loader sniffs the magic bytes, renormalizes rows, and validates.

inline constexpr char kSeriesMagic[4] = {'M', 'V', 'E', 'S'};
inline constexpr unsigned char kSeriesVersion = 1;

FrameEmbeddingSeries load_series(const std::filesystem::path& path);
FrameEmbeddingSeries parse_series_text(std::string_view text);
FrameEmbeddingSeries parse_series_binary(std::string_view bytes);
std::string series_to_text(const FrameEmbeddingSeries& s);
std::string series_to_binary(const FrameEmbeddingSeries& s);

}  // namespace mmvir
