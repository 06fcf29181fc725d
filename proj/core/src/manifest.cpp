// Copyright 2026 The kwsem Authors. All Rights Reserved.
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

#include "kwsem/manifest.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kwsem/error.hpp"

namespace kwsem {
namespace {

constexpr const char* kHeader = "keyword,class_index,utterance_id,audio_path,start_s,end_s,split,pool";

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(what + ": not a number: '" + s + "'");
  return v;
}

std::size_t parse_index(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(what + ": not an index: '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field");
  out.push_back(std::move(cur));
  return out;
}

void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << kHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.keyword) << ',' << r.class_index << ',' << csv_field(r.utterance_id) << ','
        << csv_field(r.audio_path) << ',' << format_double(r.start_s) << ','
        << format_double(r.end_s) << ',' << csv_field(r.split) << ',' << csv_field(r.pool) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == kHeader) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string> f;
    try {
      f = split_csv_line(line);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (f.size() != 8) {
      throw ParseError(where + ": expected 8 fields, got " + std::to_string(f.size()));
    }
    ManifestRow r;
    r.keyword = f[0];
    r.class_index = parse_index(f[1], where);
    r.utterance_id = f[2];
    r.audio_path = f[3];
    r.start_s = parse_double(f[4], where);
    r.end_s = parse_double(f[5], where);
    r.split = f[6];
    r.pool = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace kwsem
