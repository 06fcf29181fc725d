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

#ifndef KWSEM_MANIFEST_HPP_
#define KWSEM_MANIFEST_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace kwsem {

// One labelled keyword span. CSV columns, in order:
// keyword,class_index,utterance_id,audio_path,start_s,end_s,split,pool
struct ManifestRow {
  std::string keyword;
  std::size_t class_index = 0;
  std::string utterance_id;
  std::string audio_path;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string split;  // train | dev | test
  std::string pool;   // train | clean | other

  bool operator==(const ManifestRow&) const = default;
};

void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_manifest(const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// RFC 4180-style field splitting with double-quote escaping.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_field(const std::string& field);

}  // namespace kwsem

#endif  // KWSEM_MANIFEST_HPP_
