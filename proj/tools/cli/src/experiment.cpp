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

#include "mapmix/cli/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "mapmix/checkpoint.hpp"
#include "mapmix/error.hpp"

namespace mapmix::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const char* kManifestName = "manifest.jsonl";
const char* kFramesName = "frames.bin";
const char* kTaxonomyName = "taxonomy.json";
const char* kCorpusInfoName = "corpus.json";

template <typename T>
T Get(const Json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, "config key '" + key + "': " + e.what());
  }
}

void ApplySynthJson(const Json& doc, synth::SynthConfig& s) {
  if (!doc.is_object()) throw Error(ErrorKind::kConfig, "config key 'synth' must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "n_clusters") s.n_clusters = Get<std::size_t>(value, key);
    else if (key == "dialects_per_cluster")
      s.dialects_per_cluster = Get<std::vector<std::size_t>>(value, key);
    else if (key == "dim") s.dim = Get<std::size_t>(value, key);
    else if (key == "train_per_dialect") s.train_per_dialect = Get<std::size_t>(value, key);
    else if (key == "eval_per_dialect") s.eval_per_dialect = Get<std::size_t>(value, key);
    else if (key == "frames_min") s.frames_min = Get<std::size_t>(value, key);
    else if (key == "frames_max") s.frames_max = Get<std::size_t>(value, key);
    else if (key == "cluster_sep") s.cluster_sep = Get<double>(value, key);
    else if (key == "dialect_sep") s.dialect_sep = Get<double>(value, key);
    else if (key == "frame_noise") s.frame_noise = Get<double>(value, key);
    else if (key == "speaker_noise") s.speaker_noise = Get<double>(value, key);
    else if (key == "filler_frac") s.filler_frac = Get<double>(value, key);
    else if (key == "speech_offset") s.speech_offset = Get<double>(value, key);
    else if (key == "label_noise_frac") s.label_noise_frac = Get<double>(value, key);
    else if (key == "frame_rate_hz") s.frame_rate_hz = Get<double>(value, key);
    else if (key == "seed") s.seed = Get<std::uint64_t>(value, key);
    else throw Error(ErrorKind::kConfig, "unknown synth config key '" + key + "'");
  }
}

std::string FormatMetric(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

void RequireDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create directory " + dir.string());
}

}  // namespace

ExperimentConfig DefaultConfig() {
  ExperimentConfig config;
  config.train.epochs = 50;
  config.train.learning_rate = 1e-3;
  config.train.alpha = 0.5;
  config.train.batch_size = 32;
  config.synth = synth::BenchmarkConfig();
  return config;
}

void ApplyJson(const std::string& json_text, ExperimentConfig& c) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "corpus_dir") c.corpus_dir = Get<std::string>(value, key);
    else if (key == "manifest") c.manifest = Get<std::string>(value, key);
    else if (key == "frames") c.frames = Get<std::string>(value, key);
    else if (key == "taxonomy") c.taxonomy = Get<std::string>(value, key);
    else if (key == "frame_rate_hz") c.frame_rate_hz = Get<double>(value, key);
    else if (key == "epochs") c.train.epochs = Get<std::size_t>(value, key);
    else if (key == "learning_rate") c.train.learning_rate = Get<double>(value, key);
    else if (key == "alpha") c.train.alpha = Get<double>(value, key);
    else if (key == "batch_size") c.train.batch_size = Get<std::size_t>(value, key);
    else if (key == "adam_beta1") c.train.adam_beta1 = Get<double>(value, key);
    else if (key == "adam_beta2") c.train.adam_beta2 = Get<double>(value, key);
    else if (key == "adam_eps") c.train.adam_eps = Get<double>(value, key);
    else if (key == "strategy")
      c.train.strategy = augment::ParseStrategy(Get<std::string>(value, key));
    else if (key == "label_mode")
      c.train.label_mode = model::ParseLabelMode(Get<std::string>(value, key));
    else if (key == "smoothing_s") c.train.smoothing_s = Get<double>(value, key);
    else if (key == "seed") c.train.seed = Get<std::uint64_t>(value, key);
    else if (key == "variability_percentile")
      c.partition.variability_percentile = Get<double>(value, key);
    else if (key == "confidence_percentile")
      c.partition.confidence_percentile = Get<double>(value, key);
    else if (key == "chunk_len_s") c.chunk.chunk_len_s = Get<double>(value, key);
    else if (key == "stride_s") c.chunk.stride_s = Get<double>(value, key);
    else if (key == "ece_bins") c.ece_bins = Get<std::size_t>(value, key);
    else if (key == "hours_per_dialect") c.hours_per_dialect = Get<double>(value, key);
    else if (key == "n_subsets") c.n_subsets = Get<std::size_t>(value, key);
    else if (key == "seeds") c.seeds = Get<std::vector<std::uint64_t>>(value, key);
    else if (key == "strategies") {
      c.strategies.clear();
      for (const auto& name : Get<std::vector<std::string>>(value, key)) {
        c.strategies.push_back(augment::ParseStrategy(name));
      }
    } else if (key == "out") c.out = Get<std::string>(value, key);
    else if (key == "datamap") c.datamap = Get<std::string>(value, key);
    else if (key == "checkpoint") c.checkpoint = Get<std::string>(value, key);
    else if (key == "synth") ApplySynthJson(value, c.synth);
    else throw Error(ErrorKind::kConfig, "unknown config key '" + key + "'");
  }
}

void ApplyJsonFile(const fs::path& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  ApplyJson(text.str(), config);
}

std::vector<std::uint64_t> ResolveSeeds(const ExperimentConfig& config) {
  if (!config.seeds.empty()) {
    if (config.n_subsets && *config.n_subsets != config.seeds.size()) {
      throw Error(ErrorKind::kConfig, "n_subsets does not match the number of seeds");
    }
    return config.seeds;
  }
  const std::size_t n = config.n_subsets.value_or(3);
  if (n == 0) throw Error(ErrorKind::kConfig, "n_subsets must be positive");
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < n; ++k) seeds.push_back(config.train.seed + k);
  return seeds;
}

corpus::Corpus LoadConfiguredCorpus(const ExperimentConfig& config) {
  fs::path manifest = config.manifest;
  fs::path frames = config.frames;
  fs::path taxonomy_path = config.taxonomy;
  std::optional<double> frame_rate = config.frame_rate_hz;
  if (!config.corpus_dir.empty()) {
    if (manifest.empty()) manifest = config.corpus_dir / kManifestName;
    if (frames.empty()) frames = config.corpus_dir / kFramesName;
    if (taxonomy_path.empty() && fs::exists(config.corpus_dir / kTaxonomyName)) {
      taxonomy_path = config.corpus_dir / kTaxonomyName;
    }
    const fs::path info_path = config.corpus_dir / kCorpusInfoName;
    if (!frame_rate && fs::exists(info_path)) {
      std::ifstream in(info_path);
      try {
        frame_rate = Json::parse(in).at("frame_rate_hz").get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::kFormat, info_path.string() + ": " + e.what());
      }
    }
  }
  if (manifest.empty() || frames.empty()) {
    throw Error(ErrorKind::kConfig, "no corpus given (use --corpus or manifest/frames keys)");
  }
  if (!frame_rate) {
    throw Error(ErrorKind::kConfig, "frame_rate_hz is required when the corpus has no corpus.json");
  }
  const corpus::Taxonomy taxonomy = taxonomy_path.empty() ? corpus::Taxonomy::Default()
                                                          : corpus::LoadTaxonomy(taxonomy_path);
  return corpus::LoadCorpus(manifest, frames, taxonomy, *frame_rate);
}

void WriteCorpusDirectory(const synth::SynthResult& result, const fs::path& dir) {
  RequireDir(dir);
  corpus::WriteCorpus(result.corpus, dir / kManifestName, dir / kFramesName);
  corpus::WriteTaxonomy(result.corpus.taxonomy, dir / kTaxonomyName);
  nlohmann::ordered_json info;
  info["frame_rate_hz"] = result.corpus.frame_rate_hz;
  info["dim"] = result.corpus.dim;
  info["num_utterances"] = result.corpus.utterances.size();
  std::ofstream out(dir / kCorpusInfoName, std::ios::trunc);
  out << info.dump(2) << '\n';
  std::ofstream noised(dir / "noised_ids.txt", std::ios::trunc);
  for (const auto& id : result.noised_ids) noised << id << '\n';
  if (!out || !noised) throw Error(ErrorKind::kIo, "failed writing corpus directory " + dir.string());
}

dynamics::DatamapResult BuildDatamap(const model::TrainOutput& baseline,
                                     const dynamics::PartitionConfig& partition) {
  return dynamics::PartitionRegions(dynamics::ComputeStats(baseline.dynamics), partition);
}

std::vector<RunResult> RunStrategySuite(const corpus::Corpus& corpus,
                                        const std::vector<augment::Strategy>& strategies,
                                        const ExperimentConfig& config, std::uint64_t seed,
                                        dynamics::DatamapResult* datamap_out) {
  model::TrainConfig train = config.train;
  train.seed = seed;
  train.strategy = augment::Strategy::kNone;
  model::TrainOutput baseline = model::Train(corpus, nullptr, train);
  const dynamics::DatamapResult datamap = BuildDatamap(baseline, config.partition);
  if (datamap_out != nullptr) *datamap_out = datamap;

  auto evaluate = [&](augment::Strategy strategy, model::TrainOutput output) {
    RunResult run;
    run.strategy = strategy;
    const auto predictions = metrics::Evaluate(corpus, output.params, config.chunk);
    run.report = metrics::BuildReport(predictions, corpus.taxonomy, config.ece_bins);
    run.train = std::move(output);
    return run;
  };

  std::vector<RunResult> runs;
  for (augment::Strategy strategy : strategies) {
    if (strategy == augment::Strategy::kNone) {
      runs.push_back(evaluate(strategy, baseline));
      continue;
    }
    train.strategy = strategy;
    runs.push_back(evaluate(strategy, model::Train(corpus, &datamap, train)));
  }
  return runs;
}

MetricMeans Average(augment::Strategy strategy, const std::vector<metrics::EvalReport>& reports) {
  MetricMeans means;
  means.strategy = strategy;
  means.runs = reports.size();
  if (reports.empty()) return means;
  for (const auto& r : reports) {
    means.acc += r.acc;
    means.wf1 += r.wf1;
    means.cluster_acc += r.cluster_acc;
    means.ece += r.ece;
  }
  const auto n = static_cast<double>(reports.size());
  means.acc /= n;
  means.wf1 /= n;
  means.cluster_acc /= n;
  means.ece /= n;
  return means;
}

void WriteDynamicsCsv(const dynamics::DynamicsLog& log, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "id";
  for (std::size_t e = 0; e < log.num_epochs(); ++e) out << ",epoch" << e + 1;
  out << '\n';
  for (std::size_t k = 0; k < log.ids.size(); ++k) {
    out << log.ids[k];
    for (double p : log.probs[k]) out << ',' << p;
    out << '\n';
  }
}

void WriteLossCurveCsv(const std::vector<double>& curve, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.precision(17);
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < curve.size(); ++e) out << e + 1 << ',' << curve[e] << '\n';
}

void CmdSynth(const ExperimentConfig& config) {
  const synth::SynthResult result = synth::Generate(config.synth);
  WriteCorpusDirectory(result, config.out);
  std::cout << "wrote " << result.corpus.utterances.size() << " utterances ("
            << result.corpus.taxonomy.num_dialects() << " dialects, "
            << result.corpus.taxonomy.num_clusters() << " clusters, "
            << result.noised_ids.size() << " noised) to " << config.out.string() << '\n';
}

void CmdMap(const ExperimentConfig& config) {
  const corpus::Corpus corpus = LoadConfiguredCorpus(config);
  model::TrainConfig train = config.train;
  train.strategy = augment::Strategy::kNone;
  const model::TrainOutput output = model::Train(corpus, nullptr, train);
  const dynamics::DatamapResult datamap = BuildDatamap(output, config.partition);
  RequireDir(config.out);
  dynamics::ExportDatamap(datamap, config.out / "datamap.csv");
  WriteDynamicsCsv(output.dynamics, config.out / "dynamics.csv");
  WriteLossCurveCsv(output.loss_curve, config.out / "loss_curve.csv");
  std::cout << "datamap: " << datamap.IdsIn(dynamics::Region::kEasy).size() << " easy, "
            << datamap.IdsIn(dynamics::Region::kAmbiguous).size() << " ambiguous, "
            << datamap.IdsIn(dynamics::Region::kHard).size() << " hard\n";
}

void CmdTrain(const ExperimentConfig& config) {
  if (augment::NeedsDatamap(config.train.strategy) && !config.datamap) {
    throw Error(ErrorKind::kConfig, "strategy " +
                                        std::string(augment::ToString(config.train.strategy)) +
                                        " requires --datamap");
  }
  const corpus::Corpus corpus = LoadConfiguredCorpus(config);
  std::optional<dynamics::DatamapResult> datamap;
  if (config.datamap) datamap = dynamics::LoadDatamap(*config.datamap);
  const model::TrainOutput output =
      model::Train(corpus, datamap ? &*datamap : nullptr, config.train);
  RequireDir(config.out);
  WriteCheckpoint({output.params, config.train, corpus.taxonomy.dialects()},
                  config.out / "checkpoint.json");
  WriteDynamicsCsv(output.dynamics, config.out / "dynamics.csv");
  WriteLossCurveCsv(output.loss_curve, config.out / "loss_curve.csv");
  std::cout << "trained " << augment::ToString(config.train.strategy) << " for "
            << config.train.epochs << " epochs; final loss "
            << (output.loss_curve.empty() ? 0.0 : output.loss_curve.back()) << '\n';
}

metrics::EvalReport CmdEval(const ExperimentConfig& config) {
  if (!config.checkpoint) throw Error(ErrorKind::kConfig, "eval requires --checkpoint");
  const Checkpoint checkpoint = LoadCheckpoint(*config.checkpoint);
  const corpus::Corpus corpus = LoadConfiguredCorpus(config);
  if (checkpoint.params.dim() != corpus.dim) {
    throw Error(ErrorKind::kSchema, "checkpoint dimension " +
                                        std::to_string(checkpoint.params.dim()) +
                                        " does not match corpus dimension " +
                                        std::to_string(corpus.dim));
  }
  if (checkpoint.dialects != corpus.taxonomy.dialects()) {
    throw Error(ErrorKind::kSchema, "checkpoint dialects do not match the corpus taxonomy");
  }
  const auto predictions = metrics::Evaluate(corpus, checkpoint.params, config.chunk);
  const metrics::EvalReport report =
      metrics::BuildReport(predictions, corpus.taxonomy, config.ece_bins);
  RequireDir(config.out);
  metrics::WriteReportJson(report, config.out / "report.json");
  metrics::WriteConfusionCsv(report, corpus.taxonomy, config.out / "confusion.csv");
  std::cout << "acc " << FormatMetric(report.acc) << "  wf1 " << FormatMetric(report.wf1)
            << "  c.acc " << FormatMetric(report.cluster_acc) << "  ece "
            << FormatMetric(report.ece) << "  n " << report.n << '\n';
  return report;
}

std::vector<MetricMeans> CmdCompare(const ExperimentConfig& config) {
  const corpus::Corpus full = LoadConfiguredCorpus(config);
  const std::vector<std::uint64_t> seeds = ResolveSeeds(config);
  if (config.strategies.empty()) throw Error(ErrorKind::kConfig, "no strategies to compare");
  RequireDir(config.out);

  struct Subset {
    corpus::Corpus corpus;
    std::uint64_t seed;
    model::TrainOutput baseline;
    dynamics::DatamapResult datamap;
  };
  std::vector<Subset> subsets;
  for (std::uint64_t seed : seeds) {
    Subset s{corpus::SubsampleBudget(full, config.hours_per_dialect, seed), seed, {}, {}};
    model::TrainConfig train = config.train;
    train.seed = seed;
    train.strategy = augment::Strategy::kNone;
    s.baseline = model::Train(s.corpus, nullptr, train);
    s.datamap = BuildDatamap(s.baseline, config.partition);
    dynamics::ExportDatamap(s.datamap, config.out / ("datamap_seed" + std::to_string(seed) + ".csv"));
    subsets.push_back(std::move(s));
  }

  std::ofstream table(config.out / "compare.csv", std::ios::trunc);
  std::ofstream runs(config.out / "runs.csv", std::ios::trunc);
  if (!table || !runs) throw Error(ErrorKind::kIo, "cannot write comparison tables");
  table << "strategy,Acc,WF1,C.Acc,ECE\n";
  runs << "strategy,seed,Acc,WF1,C.Acc,ECE\n";

  std::vector<MetricMeans> means;
  for (augment::Strategy strategy : config.strategies) {
    std::vector<metrics::EvalReport> reports;
    for (const Subset& s : subsets) {
      model::TrainConfig train = config.train;
      train.seed = s.seed;
      train.strategy = strategy;
      const model::TrainOutput output = strategy == augment::Strategy::kNone
                                            ? s.baseline
                                            : model::Train(s.corpus, &s.datamap, train);
      const auto predictions = metrics::Evaluate(s.corpus, output.params, config.chunk);
      reports.push_back(metrics::BuildReport(predictions, s.corpus.taxonomy, config.ece_bins));
      const auto& r = reports.back();
      runs << augment::ToString(strategy) << ',' << s.seed << ',' << FormatMetric(r.acc) << ','
           << FormatMetric(r.wf1) << ',' << FormatMetric(r.cluster_acc) << ','
           << FormatMetric(r.ece) << '\n';
    }
    means.push_back(Average(strategy, reports));
    const auto& m = means.back();
    table << augment::ToString(strategy) << ',' << FormatMetric(m.acc) << ','
          << FormatMetric(m.wf1) << ',' << FormatMetric(m.cluster_acc) << ','
          << FormatMetric(m.ece) << '\n';
    table.flush();
    runs.flush();
  }

  std::ostringstream text;
  char line[128];
  std::snprintf(line, sizeof(line), "%-16s %7s %7s %7s %7s\n", "strategy", "Acc", "WF1", "C.Acc",
                "ECE");
  text << line;
  for (const auto& m : means) {
    std::snprintf(line, sizeof(line), "%-16s %7.3f %7.3f %7.3f %7.3f\n",
                  std::string(augment::ToString(m.strategy)).c_str(), m.acc, m.wf1,
                  m.cluster_acc, m.ece);
    text << line;
  }
  std::ofstream(config.out / "compare.txt", std::ios::trunc) << text.str();
  std::cout << text.str();
  return means;
}

}  // namespace mapmix::cli
