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

#ifndef KWSEM_TOOLS_COMMANDS_HPP_
#define KWSEM_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace kwsem::cli {

struct SynthArgs {
  std::string out;
  std::size_t utterances = 200;
  std::size_t vocabulary = 60;
  std::size_t phrases = 8;
  std::size_t min_words = 4;
  std::size_t max_words = 10;
  double phrase_probability = 0.5;
  double other_fraction = 0.3;
  std::uint64_t seed = 0;
};

struct MineArgs {
  std::string alignments;
  std::string out;
  std::string pools;
  std::string dev_alignments;
  std::size_t n_max = 5;
  std::size_t min_chars = 10;
  std::size_t min_count = 10;
  std::size_t holdout = 150;
  std::size_t holdout_min = 100;
  std::size_t train_per_keyword = 90;
  std::size_t dev_per_keyword = 10;
  double dev_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct PretrainArgs {
  std::string manifest;
  std::string out;
  std::size_t steps = 5000;
  std::size_t batch = 32;
  double lr = 5e-4;
  std::size_t eval_every = 250;
  double target_dev = 0.0;
  double target_train = 0.0;
  std::uint64_t seed = 0;
};

struct HeadArgs {
  std::string checkpoint;
  std::string manifest;
  std::string task;
  std::string out;
  std::string mode;  // overrides the task file when set
};

struct RegisterArgs {
  std::string checkpoint;
  std::string manifest;
  std::string out;
  std::vector<std::string> keywords;
  std::vector<std::string> negative_words;
  std::size_t k = 5;
  std::size_t k_neg = 50;
  double lr = 1e-2;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;
};

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string out;
  std::string split = "test";
  std::vector<std::string> negative_words;
};

struct SweepArgs {
  std::string checkpoint;
  std::string manifest;
  std::string out;
  std::vector<std::string> modes = {"fix"};
  std::vector<std::size_t> ks = {1, 5, 10};
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> classes;
  std::vector<std::string> negative_words;
  std::size_t negatives_per_k = 3;
};

struct ProjectArgs {
  std::string checkpoint;
  std::string manifest;
  std::string out;
  std::vector<std::string> keywords;
  std::string split = "test";
  std::size_t max_per_keyword = 0;  // 0 = all
};

// Each command returns a summary recorded in the run metadata.
nlohmann::json cmd_synth(const SynthArgs& args, std::ostream& log);
nlohmann::json cmd_mine(const MineArgs& args, std::ostream& log);
nlohmann::json cmd_pretrain(const PretrainArgs& args, std::ostream& log);
nlohmann::json cmd_train_head(const HeadArgs& args, std::ostream& log);
nlohmann::json cmd_register(const RegisterArgs& args, std::ostream& log);
nlohmann::json cmd_eval(const EvalArgs& args, std::ostream& log);
nlohmann::json cmd_sweep(const SweepArgs& args, std::ostream& log);
nlohmann::json cmd_project(const ProjectArgs& args, std::ostream& log);

}  // namespace kwsem::cli

#endif  // KWSEM_TOOLS_COMMANDS_HPP_
