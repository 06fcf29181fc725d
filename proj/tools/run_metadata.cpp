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

#include "run_metadata.hpp"

#include <filesystem>
#include <fstream>

#include "kwsem/error.hpp"
#include "kwsem/parallel.hpp"
#include "kwsem_cli_version.hpp"

namespace kwsem::cli {

nlohmann::json to_json(const RunMetadata& meta) {
  nlohmann::json j;
  j["command"] = meta.command;
  j["argv"] = meta.argv;
  nlohmann::json opts = nlohmann::json::object();
  for (const auto& [k, v] : meta.options) opts[k] = v.size() == 1 ? nlohmann::json(v[0]) : nlohmann::json(v);
  j["options"] = opts;
  if (auto it = meta.options.find("seed"); it != meta.options.end() && !it->second.empty()) {
    j["seed"] = it->second.front();
  }
  j["version"] = KWSEM_CLI_VERSION;
  j["revision"] = KWSEM_CLI_REVISION;
  j["threads"] = worker_count();
  j["summary"] = meta.summary;
  return j;
}

void write_run_metadata(const std::string& out_dir, const RunMetadata& meta) {
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "run_metadata.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(meta).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace kwsem::cli
