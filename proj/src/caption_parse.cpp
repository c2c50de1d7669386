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

#include "mmvir/caption_parse.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "mmvir/error.hpp"
#include "mmvir/prompts.hpp"
#include "mmvir/text.hpp"

namespace mmvir {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string strip_fences(std::string_view raw) {
  std::string out;
  std::size_t i = 0;
  while (i < raw.size()) {
    auto eol = raw.find('\n', i);
    if (eol == std::string_view::npos) eol = raw.size();
    const auto line = raw.substr(i, eol - i);
    if (text::trim(line).substr(0, 3) != "```") {
      out.append(line);
      out.push_back('\n');
    }
    i = eol + 1;
  }
  return out;
}

/// Recursive-descent reader for JSON-ish literals.
class LooseReader {
 public:
  explicit LooseReader(std::string_view s) : s_(s) {}

  std::optional<Json> list() {
    skip_ws();
    if (!eat('[')) return std::nullopt;
    Json arr = Json::array();
    while (true) {
      skip_ws();
      if (eat(']')) return arr;
      if (at_end()) return std::nullopt;
      auto v = value(Ctx::kList);
      if (!v) return std::nullopt;
      arr.push_back(std::move(*v));
      skip_ws();
      if (eat(',')) continue;
      if (eat(']')) return arr;
      return std::nullopt;
    }
  }

 private:
  enum class Ctx { kList, kDict };

  std::optional<Json> value(Ctx ctx) {
    skip_ws();
    if (at_end()) return std::nullopt;
    const char c = s_[pos_];
    if (c == '[') return list();
    if (c == '{') return dict();
    if (c == '"' || c == '\'') {
      const auto save = pos_;
      if (auto q = quoted(ctx == Ctx::kDict ? "}," : "],")) return Json(*q);
      pos_ = save;
    }
    return bare(ctx);
  }

  std::optional<Json> dict() {
    if (!eat('{')) return std::nullopt;
    Json obj = Json::object();
    while (true) {
      skip_ws();
      if (eat('}')) return obj;
      if (at_end()) return std::nullopt;
      auto k = key();
      if (!k) return std::nullopt;
      skip_ws();
      if (!eat(':')) return std::nullopt;
      auto v = value(Ctx::kDict);
      if (!v) return std::nullopt;
      obj[*k] = std::move(*v);
      skip_ws();
      if (eat(',')) continue;
      if (eat('}')) return obj;
      return std::nullopt;
    }
  }

  std::optional<std::string> key() {
    skip_ws();
    if (at_end()) return std::nullopt;
    if (s_[pos_] == '"' || s_[pos_] == '\'') return quoted(":");
    const auto start = pos_;
    while (!at_end() && s_[pos_] != ':' && s_[pos_] != '}' && s_[pos_] != ',') ++pos_;
    auto k = std::string(text::trim(s_.substr(start, pos_ - start)));
    if (k.empty()) return std::nullopt;
    return k;
  }

  /// A quoted string. A quote character only closes the string when the next
  /// non-space character is in `closers` (so "the man's hat" survives
  /// single-quoting).
  std::optional<std::string> quoted(std::string_view closers) {
    const char q = s_[pos_++];
    std::string out;
    while (!at_end()) {
      const char c = s_[pos_];
      if (c == '\\' && pos_ + 1 < s_.size()) {
        const char n = s_[pos_ + 1];
        switch (n) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case 'u': {
            if (pos_ + 5 < s_.size()) {
              const auto cp = std::strtoul(std::string(s_.substr(pos_ + 2, 4)).c_str(), nullptr, 16);
              append_utf8(out, static_cast<unsigned>(cp));
              pos_ += 6;
              continue;
            }
            out.push_back(n);
            break;
          }
          default: out.push_back(n); break;
        }
        pos_ += 2;
        continue;
      }
      if (c == q) {
        auto look = pos_ + 1;
        while (look < s_.size() && is_space(s_[look])) ++look;
        if (look >= s_.size() || closers.find(s_[look]) != std::string_view::npos) {
          pos_ += 1;
          return out;
        }
      }
      out.push_back(c);
      ++pos_;
    }
    return std::nullopt;
  }

  /// Unquoted text. Inside a dict it runs to '}' or to a comma that starts
  /// the next `key:`; inside a list it runs to ',' or ']'.
  std::optional<Json> bare(Ctx ctx) {
    const auto start = pos_;
    int depth = 0;
    while (!at_end()) {
      const char c = s_[pos_];
      if (c == '[' || c == '{') ++depth;
      if ((c == ']' || c == '}') && depth > 0) {
        --depth;
        ++pos_;
        continue;
      }
      if (depth == 0) {
        if (ctx == Ctx::kList && (c == ',' || c == ']')) break;
        if (ctx == Ctx::kDict && c == '}') break;
        if (ctx == Ctx::kDict && c == ',' && next_is_key(pos_ + 1)) break;
      }
      ++pos_;
    }
    const auto tok = text::trim(s_.substr(start, pos_ - start));
    if (tok.empty()) return std::nullopt;
    return scalar(tok);
  }

  bool next_is_key(std::size_t p) const {
    while (p < s_.size() && is_space(s_[p])) ++p;
    if (p >= s_.size()) return false;
    const char c = s_[p];
    if (c == '\'' || c == '"') {
      const auto close = s_.find(c, p + 1);
      if (close == std::string_view::npos) return false;
      auto q = close + 1;
      while (q < s_.size() && is_space(s_[q])) ++q;
      return q < s_.size() && s_[q] == ':';
    }
    // bare key: identifier-ish word(s) followed by ':'
    while (p < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p])) || s_[p] == '_' || s_[p] == ' ')) ++p;
    return p < s_.size() && s_[p] == ':';
  }

  static Json scalar(std::string_view tok) {
    const std::string t(tok);
    char* end = nullptr;
    const double d = std::strtod(t.c_str(), &end);
    if (end == t.c_str() + t.size() && std::isfinite(d)) {
      if (d == std::floor(d) && std::abs(d) < 1e15 && t.find_first_of(".eE") == std::string::npos) {
        return Json(static_cast<std::int64_t>(d));
      }
      return Json(d);
    }
    const auto low = text::to_lower_ascii(t);
    if (low == "true") return Json(true);
    if (low == "false") return Json(false);
    if (low == "null" || low == "none") return Json(nullptr);
    return Json(t);
  }

  static void append_utf8(std::string& out, unsigned cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  void skip_ws() {
    while (!at_end() && is_space(s_[pos_])) ++pos_;
  }
  bool eat(char c) {
    if (!at_end() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool at_end() const { return pos_ >= s_.size(); }

  std::string_view s_;
  std::size_t pos_ = 0;
};

/// Span from the first '[' to its matching ']' (brackets inside
/// double-quoted strings ignored). Falls back to the last ']' when the
/// brackets do not balance.
std::optional<std::string_view> outermost_list(std::string_view s) {
  const auto open = s.find('[');
  if (open == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_str = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '[') ++depth;
    else if (c == ']' && --depth == 0) return s.substr(open, i - open + 1);
  }
  const auto close = s.rfind(']');
  if (close == std::string_view::npos || close < open) return std::nullopt;
  return s.substr(open, close - open + 1);
}

std::string norm_key(std::string_view k) {
  std::string out;
  for (char c : text::trim(k)) {
    if (c == '_' || c == '-') c = ' ';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string as_text(const Json& v) {
  if (v.is_string()) return std::string(text::trim(v.get<std::string>()));
  if (v.is_null()) return {};
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) {
      if (!out.empty()) out += ", ";
      out += as_text(e);
    }
    return out;
  }
  if (v.is_number_float()) return text::fixed6(v.get<double>());
  return v.dump();
}

std::vector<std::string> as_list(const Json& v) {
  std::vector<std::string> out;
  auto push_split = [&](const std::string& s) {
    std::size_t i = 0;
    while (i <= s.size()) {
      auto comma = s.find(',', i);
      if (comma == std::string::npos) comma = s.size();
      auto piece = std::string(text::trim(std::string_view(s).substr(i, comma - i)));
      if (!piece.empty()) out.push_back(std::move(piece));
      i = comma + 1;
    }
  };
  if (v.is_array()) {
    for (const auto& e : v) push_split(as_text(e));
  } else if (!v.is_null()) {
    push_split(as_text(v));
  }
  return out;
}

int as_count(const Json& v, Extras& extras, const std::string& key) {
  double d = std::nan("");
  if (v.is_number()) {
    d = v.get<double>();
  } else if (v.is_string()) {
    const auto s = std::string(text::trim(v.get<std::string>()));
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (!s.empty() && end == s.c_str() + s.size()) d = x;
  }
  if (std::isfinite(d) && d >= 1.0 && d == std::floor(d) && d < 1e9) return static_cast<int>(d);
  extras[key] = as_text(v);
  return 1;
}

/// Looks up the first present alias; removes it from `fields`.
std::optional<Json> take(std::map<std::string, std::pair<std::string, Json>>& fields,
                         std::initializer_list<std::string_view> aliases) {
  for (auto a : aliases) {
    auto it = fields.find(std::string(a));
    if (it != fields.end()) {
      auto v = std::move(it->second.second);
      fields.erase(it);
      return v;
    }
  }
  return std::nullopt;
}

Extras leftovers(const std::map<std::string, std::pair<std::string, Json>>& fields) {
  Extras e;
  for (const auto& [norm, kv] : fields) e[kv.first] = as_text(kv.second);
  return e;
}

void add_record(ParsedCaption& out, CaptionKind kind, const Json& item) {
  std::map<std::string, std::pair<std::string, Json>> fields;
  if (item.is_object()) {
    for (auto it = item.begin(); it != item.end(); ++it) fields[norm_key(it.key())] = {it.key(), it.value()};
  } else {
    // A bare string element stands for the primary field.
    const auto primary = kind == CaptionKind::kAction   ? "action description"
                         : kind == CaptionKind::kScene  ? "description"
                                                        : "object name";
    fields[primary] = {primary, item};
  }
  switch (kind) {
    case CaptionKind::kAction: {
      ActionRecord r;
      r.description = as_text(take(fields, {"action description", "action", "description"}).value_or(""));
      r.extras = leftovers(fields);
      if (!r.description.empty()) out.actions.push_back(std::move(r));
      break;
    }
    case CaptionKind::kScene: {
      SceneRecord r;
      r.description = as_text(take(fields, {"description", "scene description", "scene"}).value_or(""));
      r.setting = as_text(take(fields, {"setting", "location", "place"}).value_or(""));
      r.action = as_text(take(fields, {"action", "activity"}).value_or(""));
      r.extras = leftovers(fields);
      if (!r.description.empty() || !r.setting.empty() || !r.action.empty()) out.scenes.push_back(std::move(r));
      break;
    }
    case CaptionKind::kObject: {
      ObjectRecord r;
      r.name = as_text(take(fields, {"object name", "name", "object"}).value_or(""));
      if (auto n = take(fields, {"number", "count", "quantity"})) r.count = as_count(*n, r.extras, "number");
      if (auto a = take(fields, {"attributes", "attribute"})) r.attributes = as_list(*a);
      for (auto& [k, v] : leftovers(fields)) r.extras.emplace(k, v);
      if (!r.name.empty()) out.objects.push_back(std::move(r));
      break;
    }
    case CaptionKind::kSpatial: {
      SpatialRecord r;
      r.object_name = as_text(take(fields, {"object name", "name", "object"}).value_or(""));
      if (auto n = take(fields, {"number", "count", "quantity"})) r.count = as_count(*n, r.extras, "number");
      if (auto a = take(fields, {"attributes", "attribute"})) r.attributes = as_list(*a);
      if (auto s = take(fields, {"spatial relationship", "spatial relationships", "relationships", "relationship"})) {
        r.spatial_relationships = as_list(*s);
      }
      for (auto& [k, v] : leftovers(fields)) r.extras.emplace(k, v);
      if (!r.object_name.empty()) out.spatial.push_back(std::move(r));
      break;
    }
  }
}

}  // namespace

bool contains_sentinel(std::string_view raw) {
  const auto low = text::to_lower_ascii(raw);
  return low.find(prompts::kNoActionSentinel) != std::string::npos ||
         low.find(prompts::kNoObjectSentinel) != std::string::npos;
}

std::optional<Json> parse_loose_list(std::string_view raw) {
  const auto body = strip_fences(raw);
  const auto span = outermost_list(body);
  if (!span) return std::nullopt;
  try {
    auto strict = Json::parse(span->begin(), span->end());
    if (strict.is_array()) return strict;
  } catch (const Json::parse_error&) {
  }
  return LooseReader(*span).list();
}

ParsedCaption parse_caption_list(std::string_view raw, CaptionKind kind) {
  ParsedCaption out;
  const auto list = parse_loose_list(raw);
  if (list) {
    for (const auto& item : *list) add_record(out, kind, item);
    if (out.size() > 0) return out;
  }
  if (contains_sentinel(raw)) {
    out = ParsedCaption{};
    out.sentinel = true;
    return out;
  }
  if (list && list->empty()) throw CaptionParseError("empty list forbidden", std::string(raw));
  if (list) throw CaptionParseError("list has no usable records", std::string(raw));
  throw CaptionParseError("no parseable list and no sentinel", std::string(raw));
}

}  // namespace mmvir
