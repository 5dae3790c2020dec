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

#ifndef MAPMIX_CLI_EXPERIMENT_HPP_
#define MAPMIX_CLI_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mapmix/augment.hpp"
#include "mapmix/corpus.hpp"
#include "mapmix/dynamics.hpp"
#include "mapmix/metrics.hpp"
#include "mapmix/synth.hpp"
#include "mapmix/train.hpp"

namespace mapmix::cli {

// Everything one experiment needs. Loaded from a JSON file, then overridden
// by command-line flags.
struct ExperimentConfig {
  // A corpus directory as written by `synth` supplies manifest.jsonl,
  // frames.bin, taxonomy.json and corpus.json (frame rate). Explicit paths
  // take precedence over it.
  std::filesystem::path corpus_dir;
  std::filesystem::path manifest;
  std::filesystem::path frames;
  std::filesystem::path taxonomy;  // empty: built-in 14-dialect taxonomy
  std::optional<double> frame_rate_hz;

  model::TrainConfig train;
  dynamics::PartitionConfig partition;
  metrics::ChunkConfig chunk;
  std::size_t ece_bins = 10;

  double hours_per_dialect = 5.0;
  std::vector<std::uint64_t> seeds;  // one per subset; see ResolveSeeds
  std::optional<std::size_t> n_subsets;
  std::vector<augment::Strategy> strategies = augment::AllStrategies();

  std::filesystem::path out = "out";
  std::optional<std::filesystem::path> datamap;
  std::optional<std::filesystem::path> checkpoint;

  synth::SynthConfig synth;
};

// Defaults: 50 epochs, alpha 0.5, learning rate 1e-3, batch 32.
ExperimentConfig DefaultConfig();

// Applies the keys present in a JSON document on top of `config`. Throws
// kConfig for unknown keys or ill-typed values.
void ApplyJson(const std::string& json_text, ExperimentConfig& config);
void ApplyJsonFile(const std::filesystem::path& path, ExperimentConfig& config);

// Subset seeds: explicit `seeds` if given (must match n_subsets when that is
// also given), else train.seed, train.seed + 1, ... for n_subsets (default 3).
std::vector<std::uint64_t> ResolveSeeds(const ExperimentConfig& config);

corpus::Corpus LoadConfiguredCorpus(const ExperimentConfig& config);

// Writes manifest.jsonl, frames.bin, taxonomy.json, corpus.json and
// noised_ids.txt into `dir`.
void WriteCorpusDirectory(const synth::SynthResult& result, const std::filesystem::path& dir);

struct RunResult {
  augment::Strategy strategy = augment::Strategy::kNone;
  metrics::EvalReport report;
  model::TrainOutput train;
};

// Trains the strategy-none head and partitions its dynamics.
dynamics::DatamapResult BuildDatamap(const model::TrainOutput& baseline,
                                     const dynamics::PartitionConfig& partition);

// One subset of the comparison protocol: a strategy-none run whose dynamics
// give the datamap, then every requested strategy trained with `seed` and
// evaluated. Results follow the order of `strategies`.
std::vector<RunResult> RunStrategySuite(const corpus::Corpus& corpus,
                                        const std::vector<augment::Strategy>& strategies,
                                        const ExperimentConfig& config, std::uint64_t seed,
                                        dynamics::DatamapResult* datamap_out = nullptr);

struct MetricMeans {
  augment::Strategy strategy = augment::Strategy::kNone;
  double acc = 0.0;
  double wf1 = 0.0;
  double cluster_acc = 0.0;
  double ece = 0.0;
  std::size_t runs = 0;
};

MetricMeans Average(augment::Strategy strategy, const std::vector<metrics::EvalReport>& reports);

void WriteDynamicsCsv(const dynamics::DynamicsLog& log, const std::filesystem::path& path);
void WriteLossCurveCsv(const std::vector<double>& curve, const std::filesystem::path& path);

// Subcommands. Each returns normally on success and throws mapmix::Error
// otherwise.
void CmdSynth(const ExperimentConfig& config);
void CmdMap(const ExperimentConfig& config);
void CmdTrain(const ExperimentConfig& config);
metrics::EvalReport CmdEval(const ExperimentConfig& config);
std::vector<MetricMeans> CmdCompare(const ExperimentConfig& config);

// Parses argv and dispatches; returns the process exit code.
int RunMain(int argc, char** argv);

}  // namespace mapmix::cli

#endif  // MAPMIX_CLI_EXPERIMENT_HPP_
