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

#include "cli.hpp"

#include <exception>
#include <functional>

#include "CLI11.hpp"
#include "commands.hpp"
#include "kwsem/error.hpp"
#include "run_metadata.hpp"

namespace kwsem::cli {

namespace {

struct Command {
  CLI::App* app = nullptr;
  std::function<nlohmann::json(std::ostream&)> run;
};

std::map<std::string, std::vector<std::string>> resolved_options(const CLI::App& app) {
  std::map<std::string, std::vector<std::string>> out;
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
    std::string name = opt->get_name(false, true);
    const auto dash = name.find_first_not_of('-');
    if (dash != std::string::npos) name = name.substr(dash);
    if (opt->count() > 0) {
      out[name] = opt->results();
    } else if (!opt->get_default_str().empty()) {
      out[name] = {opt->get_default_str()};
    }
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
  CLI::App app{"kwsem: keyword spotting speech embedding toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::vector<Command> commands;

  SynthArgs synth;
  {
    auto* sc = app.add_subcommand("synth", "Generate a synthetic aligned speech corpus");
    sc->add_option("--out", synth.out, "Output directory")->required();
    sc->add_option("--utterances", synth.utterances, "Number of utterances");
    sc->add_option("--vocabulary", synth.vocabulary, "Distinct words");
    sc->add_option("--phrases", synth.phrases, "Recurring multi-word phrases");
    sc->add_option("--min-words", synth.min_words);
    sc->add_option("--max-words", synth.max_words);
    sc->add_option("--phrase-probability", synth.phrase_probability);
    sc->add_option("--other-fraction", synth.other_fraction, "Fraction of utterances tagged 'other'");
    sc->add_option("--seed", synth.seed)->required();
    commands.push_back({sc, [&](std::ostream& l) { return cmd_synth(synth, l); }});
  }
  MineArgs mine;
  {
    auto* sc = app.add_subcommand("mine", "Mine keywords from word alignments and write manifests");
    sc->add_option("--alignments", mine.alignments, "Alignment TSV")->required();
    sc->add_option("--out", mine.out)->required();
    sc->add_option("--pools", mine.pools, "TSV of utterance<TAB>clean|other (default: all clean)");
    sc->add_option("--dev-alignments", mine.dev_alignments, "Separate alignments for the pre-training dev split");
    sc->add_option("--n-max", mine.n_max);
    sc->add_option("--min-chars", mine.min_chars);
    sc->add_option("--min-count", mine.min_count);
    sc->add_option("--holdout", mine.holdout);
    sc->add_option("--holdout-min", mine.holdout_min);
    sc->add_option("--train-per-keyword", mine.train_per_keyword);
    sc->add_option("--dev-per-keyword", mine.dev_per_keyword);
    sc->add_option("--dev-fraction", mine.dev_fraction);
    sc->add_option("--seed", mine.seed);
    commands.push_back({sc, [&](std::ostream& l) { return cmd_mine(mine, l); }});
  }
  PretrainArgs pre;
  {
    auto* sc = app.add_subcommand("pretrain", "Pre-train the embedder on a keyword manifest");
    sc->add_option("--manifest", pre.manifest)->required();
    sc->add_option("--out", pre.out)->required();
    sc->add_option("--steps", pre.steps);
    sc->add_option("--batch", pre.batch);
    sc->add_option("--lr", pre.lr);
    sc->add_option("--eval-every", pre.eval_every);
    sc->add_option("--target-dev", pre.target_dev, "Stop once dev accuracy reaches this (0: off)");
    sc->add_option("--target-train", pre.target_train, "Also require this train accuracy (0: off)");
    sc->add_option("--seed", pre.seed)->required();
    commands.push_back({sc, [&](std::ostream& l) { return cmd_pretrain(pre, l); }});
  }
  HeadArgs head, finetune;
  for (auto* target : {&head, &finetune}) {
    const bool ft = target == &finetune;
    auto* sc = app.add_subcommand(ft ? "finetune" : "train-head",
                                  ft ? "Fine-tune embedder and head on a few-shot task"
                                     : "Train a classification head on a few-shot task");
    sc->add_option("--checkpoint", target->checkpoint)->required();
    sc->add_option("--manifest", target->manifest)->required();
    sc->add_option("--task", target->task, "Task file (classes, negative, k, k_neg, mode, seed)")->required();
    sc->add_option("--out", target->out)->required();
    if (ft) {
      target->mode = "finetune";
    } else {
      sc->add_option("--mode", target->mode, "fix | finetune | random_init (overrides the task file)");
    }
    commands.push_back({sc, [target](std::ostream& l) { return cmd_train_head(*target, l); }});
  }
  RegisterArgs reg;
  {
    auto* sc = app.add_subcommand("register", "Register keywords as sigmoid classifiers");
    sc->add_option("--checkpoint", reg.checkpoint)->required();
    sc->add_option("--manifest", reg.manifest)->required();
    sc->add_option("--out", reg.out)->required();
    sc->add_option("--keyword", reg.keywords, "Keyword to register (repeatable, in order)")->required();
    sc->add_option("--negative-words", reg.negative_words)->delimiter(',')->required();
    sc->add_option("--k", reg.k, "Positive clips per keyword");
    sc->add_option("--k-neg", reg.k_neg, "Negative clips");
    sc->add_option("--lr", reg.lr);
    sc->add_option("--epochs", reg.epochs);
    sc->add_option("--seed", reg.seed)->required();
    commands.push_back({sc, [&](std::ostream& l) { return cmd_register(reg, l); }});
  }
  EvalArgs ev;
  {
    auto* sc = app.add_subcommand("eval", "Evaluate a head and/or keyword registry");
    sc->add_option("--checkpoint", ev.checkpoint)->required();
    sc->add_option("--manifest", ev.manifest)->required();
    sc->add_option("--out", ev.out)->required();
    sc->add_option("--split", ev.split);
    sc->add_option("--negative-words", ev.negative_words, "Words scored as the negative class")->delimiter(',');
    commands.push_back({sc, [&](std::ostream& l) { return cmd_eval(ev, l); }});
  }
  SweepArgs sw;
  {
    auto* sc = app.add_subcommand("sweep", "Few-shot accuracy over modes, K and seeds");
    sc->add_option("--checkpoint", sw.checkpoint)->required();
    sc->add_option("--manifest", sw.manifest)->required();
    sc->add_option("--out", sw.out)->required();
    sc->add_option("--modes", sw.modes)->delimiter(',');
    sc->add_option("--ks", sw.ks)->delimiter(',');
    sc->add_option("--seeds", sw.seeds)->delimiter(',')->required();
    sc->add_option("--classes", sw.classes)->delimiter(',');
    sc->add_option("--negative-words", sw.negative_words)->delimiter(',');
    sc->add_option("--negatives-per-k", sw.negatives_per_k);
    commands.push_back({sc, [&](std::ostream& l) { return cmd_sweep(sw, l); }});
  }
  ProjectArgs pr;
  {
    auto* sc = app.add_subcommand("project", "PCA projection of keyword embeddings");
    sc->add_option("--checkpoint", pr.checkpoint)->required();
    sc->add_option("--manifest", pr.manifest)->required();
    sc->add_option("--out", pr.out)->required();
    sc->add_option("--keywords", pr.keywords)->delimiter(',');
    sc->add_option("--split", pr.split, "Manifest split, or 'all'");
    sc->add_option("--max-per-keyword", pr.max_per_keyword);
    commands.push_back({sc, [&](std::ostream& l) { return cmd_project(pr, l); }});
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, log, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, log, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitData;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    RunMetadata meta;
    meta.command = cmd.app->get_name();
    meta.argv = args;
    meta.options = resolved_options(*cmd.app);
    const auto out_it = meta.options.find("out");
    try {
      meta.summary = cmd.run(log);
      if (out_it != meta.options.end()) write_run_metadata(out_it->second.front(), meta);
      return kExitOk;
    } catch (const DataError& e) {
      err << "error: " << e.what() << "\n";
      return kExitData;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitIo;
    }
  }
  return kExitData;
}

}  // namespace kwsem::cli
