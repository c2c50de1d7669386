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

#include "mmvir/series.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "mmvir/canonical_json.hpp"
#include "mmvir/error.hpp"

namespace mmvir {

static_assert(std::endian::native == std::endian::little,
              "binary series I/O assumes a little-endian host");

double FrameEmbeddingSeries::duration() const {
  if (timestamps.empty()) return 0.0;
  return timestamps.back() + 1.0 / fps;
}

void FrameEmbeddingSeries::validate() const {
  const auto n = size();
  if (n < 2) throw InputError("embedding series needs at least 2 frames, got " + std::to_string(n));
  if (dim == 0) throw InputError("embedding series has dimension 0");
  if (!(fps > 0.0)) throw InputError("embedding series fps must be > 0");
  if (vectors.size() != n * dim) throw InputError("embedding series matrix has the wrong size");
  if (timestamps.front() < 0.0) throw InputError("embedding series timestamps must be >= 0");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(timestamps[i] > timestamps[i - 1])) {
      throw InputError("embedding series timestamps not strictly increasing at row " +
                       std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double ss = 0.0;
    for (double x : row(i)) ss += x * x;
    if (!std::isfinite(ss) || std::abs(std::sqrt(ss) - 1.0) > 1e-6) {
      throw InputError("embedding series row " + std::to_string(i) + " is not unit-norm");
    }
  }
}

void normalize_rows(FrameEmbeddingSeries& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    double* r = s.vectors.data() + i * s.dim;
    double ss = 0.0;
    for (std::size_t j = 0; j < s.dim; ++j) ss += r[j] * r[j];
    const double norm = std::sqrt(ss);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InputError("embedding series row " + std::to_string(i) + " has zero or non-finite norm");
    }
    for (std::size_t j = 0; j < s.dim; ++j) r[j] /= norm;
  }
}

FrameEmbeddingSeries parse_series_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  FrameEmbeddingSeries s;
  std::size_t n = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      if (!(ls >> n >> s.dim >> s.fps >> s.video_id)) {
        throw InputError("series text: bad header on line " + std::to_string(line_no));
      }
      have_header = true;
      s.timestamps.reserve(n);
      s.vectors.reserve(n * s.dim);
      continue;
    }
    double t = 0.0;
    if (!(ls >> t)) throw InputError("series text: bad row on line " + std::to_string(line_no));
    s.timestamps.push_back(t);
    for (std::size_t j = 0; j < s.dim; ++j) {
      double v = 0.0;
      if (!(ls >> v)) {
        throw InputError("series text: expected " + std::to_string(s.dim) + " values on line " +
                         std::to_string(line_no));
      }
      s.vectors.push_back(v);
    }
  }
  if (!have_header) throw InputError("series text: missing header");
  if (s.timestamps.size() != n) {
    throw InputError("series text: header says " + std::to_string(n) + " rows, found " +
                     std::to_string(s.timestamps.size()));
  }
  return s;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view b) : bytes_(b) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw ParseError("series binary: truncated", pos_);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw ParseError("series binary: truncated", pos_);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

FrameEmbeddingSeries parse_series_binary(std::string_view bytes) {
  Reader r(bytes);
  if (r.get_string(4) != std::string_view(kSeriesMagic, 4)) {
    throw ParseError("series binary: bad magic", 0);
  }
  if (const auto ver = r.get<std::uint8_t>(); ver != kSeriesVersion) {
    throw SchemaVersionError("series binary: unsupported version " + std::to_string(ver));
  }
  FrameEmbeddingSeries s;
  const auto n = r.get<std::uint32_t>();
  s.dim = r.get<std::uint32_t>();
  s.fps = r.get<double>();
  s.video_id = r.get_string(r.get<std::uint16_t>());
  s.timestamps.reserve(n);
  s.vectors.reserve(static_cast<std::size_t>(n) * s.dim);
  for (std::uint32_t i = 0; i < n; ++i) {
    s.timestamps.push_back(r.get<double>());
    for (std::size_t j = 0; j < s.dim; ++j) s.vectors.push_back(r.get<float>());
  }
  return s;
}

FrameEmbeddingSeries load_series(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  auto s = bytes.size() >= 4 && std::string_view(bytes).substr(0, 4) == std::string_view(kSeriesMagic, 4)
               ? parse_series_binary(bytes)
               : parse_series_text(bytes);
  normalize_rows(s);
  s.validate();
  return s;
}

std::string series_to_text(const FrameEmbeddingSeries& s) {
  std::ostringstream out;
  out.precision(9);
  out << s.size() << ' ' << s.dim << ' ' << s.fps << ' ' << s.video_id << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.timestamps[i];
    for (double v : s.row(i)) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

std::string series_to_binary(const FrameEmbeddingSeries& s) {
  std::string out(kSeriesMagic, 4);
  put<std::uint8_t>(out, kSeriesVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.dim));
  put<double>(out, s.fps);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(s.video_id.size()));
  out += s.video_id;
  for (std::size_t i = 0; i < s.size(); ++i) {
    put<double>(out, s.timestamps[i]);
    for (double v : s.row(i)) put<float>(out, static_cast<float>(v));
  }
  return out;
}

}  // namespace mmvir
