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

#ifndef KWSEM_TOOLS_CLI_HPP_
#define KWSEM_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace kwsem::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitData = 2;

// Runs one command line (args[0] is the program name). Progress goes to
// `log`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

}  // namespace kwsem::cli

#endif  // KWSEM_TOOLS_CLI_HPP_
