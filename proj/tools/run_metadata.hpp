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

#ifndef KWSEM_TOOLS_RUN_METADATA_HPP_
#define KWSEM_TOOLS_RUN_METADATA_HPP_

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace kwsem::cli {

struct RunMetadata {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::vector<std::string>> options;  // resolved, defaults included
  nlohmann::json summary = nlohmann::json::object();
};

nlohmann::json to_json(const RunMetadata& meta);

// Writes <out_dir>/run_metadata.json.
void write_run_metadata(const std::string& out_dir, const RunMetadata& meta);

}  // namespace kwsem::cli

#endif  // KWSEM_TOOLS_RUN_METADATA_HPP_
