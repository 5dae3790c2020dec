/*
 * Copyright 2026 The mapmix Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "mapmix/cli/experiment.hpp"
#include "mapmix/error.hpp"

namespace mapmix::cli {
namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> strategy;
  std::optional<std::string> datamap;
  std::optional<std::string> corpus;
  std::optional<std::string> checkpoint;
  std::optional<std::size_t> epochs;
};

void AddCommonFlags(CLI::App* command, Flags& flags) {
  command->add_option("--config", flags.config, "JSON experiment config");
  command->add_option("--seed", flags.seed, "random seed");
  command->add_option("--out", flags.out, "output directory");
  command->add_option("--strategy", flags.strategy,
                      "none|static|random|within_cluster|across_cluster|easy|hard|amb_easy|map_mix");
  command->add_option("--datamap", flags.datamap, "datamap CSV for region strategies");
  command->add_option("--corpus", flags.corpus, "corpus directory written by `synth`");
  command->add_option("--epochs", flags.epochs, "training epochs");
}

ExperimentConfig Resolve(const Flags& flags) {
  ExperimentConfig config = DefaultConfig();
  if (!flags.config.empty()) ApplyJsonFile(flags.config, config);
  if (flags.seed) {
    config.train.seed = *flags.seed;
    config.synth.seed = *flags.seed;
  }
  if (flags.out) config.out = *flags.out;
  if (flags.strategy) config.train.strategy = augment::ParseStrategy(*flags.strategy);
  if (flags.datamap) config.datamap = *flags.datamap;
  if (flags.corpus) config.corpus_dir = *flags.corpus;
  if (flags.checkpoint) config.checkpoint = *flags.checkpoint;
  if (flags.epochs) config.train.epochs = *flags.epochs;
  return config;
}

}  // namespace

int RunMain(int argc, char** argv) {
  CLI::App app{"Datamap-guided latent mixup toolkit for dialect classification"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dialect corpus");
  CLI::App* map = app.add_subcommand("map", "train the plain head and write its datamap");
  CLI::App* train = app.add_subcommand("train", "train with a mixup strategy");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on the eval split");
  CLI::App* compare = app.add_subcommand("compare", "compare strategies over seeded subsets");
  for (CLI::App* command : {synth, map, train, eval, compare}) AddCommonFlags(command, flags);
  eval->add_option("--checkpoint", flags.checkpoint, "checkpoint JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig config = Resolve(flags);
    if (synth->parsed()) CmdSynth(config);
    else if (map->parsed()) CmdMap(config);
    else if (train->parsed()) CmdTrain(config);
    else if (eval->parsed()) CmdEval(config);
    else if (compare->parsed()) CmdCompare(config);
  } catch (const Error& e) {
    std::cerr << "mapmix: " << e.what() << '\n';
    return ExitCode(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "mapmix: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace mapmix::cli
