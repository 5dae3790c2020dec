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

#include "mapmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "mapmix/error.hpp"

namespace mapmix::metrics {

std::vector<Chunk> ChunkOffsets(double duration_s, const ChunkConfig& config) {
  if (!(duration_s > 0.0)) throw Error(ErrorKind::kRange, "duration must be positive");
  if (!(config.chunk_len_s > 0.0) || !(config.stride_s > 0.0)) {
    throw Error(ErrorKind::kConfig, "chunk length and stride must be positive");
  }
  if (duration_s < config.chunk_len_s) return {{0.0, duration_s}};
  std::vector<Chunk> chunks;
  // Integer step counter keeps offsets exact multiples of the stride.
  for (std::size_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * config.stride_s;
    if (start + config.chunk_len_s > duration_s) break;
    chunks.push_back({start, start + config.chunk_len_s});
  }
  return chunks;
}

Vector AggregateChunks(std::span<const Vector> chunk_probs) {
  if (chunk_probs.empty()) throw Error(ErrorKind::kEvaluation, "no chunks to aggregate");
  Vector mean = Vector::Zero(chunk_probs.front().size());
  for (const auto& p : chunk_probs) mean += p;
  return mean / static_cast<double>(chunk_probs.size());
}

std::size_t Argmax(const Vector& probs) {
  std::size_t best = 0;
  for (Eigen::Index c = 1; c < probs.size(); ++c) {
    if (probs[c] > probs[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(c);
  }
  return best;
}

std::vector<Prediction> Evaluate(const corpus::Corpus& corpus, const model::ModelParams& params,
                                 const ChunkConfig& config) {
  if (params.dim() != corpus.dim || params.num_classes() != corpus.taxonomy.num_dialects()) {
    throw Error(ErrorKind::kSchema, "model shape does not match the corpus");
  }
  std::vector<Prediction> predictions;
  std::vector<Vector> chunk_probs;
  for (const auto& u : corpus.utterances) {
    if (u.split != corpus::Split::kEval) continue;
    chunk_probs.clear();
    const auto total = static_cast<Eigen::Index>(u.num_frames());
    for (const Chunk& chunk : ChunkOffsets(u.duration_s, config)) {
      const auto begin = std::min(
          total, static_cast<Eigen::Index>(std::floor(chunk.start_s * corpus.frame_rate_hz)));
      const auto end = std::min(
          total, static_cast<Eigen::Index>(std::floor(chunk.end_s * corpus.frame_rate_hz)));
      if (end <= begin) {
        std::cerr << "warning: utterance '" << u.id << "' chunk [" << chunk.start_s << ", "
                  << chunk.end_s << ") covers no frames; skipped\n";
        continue;
      }
      const Matrix frames = u.frames.middleRows(begin, end - begin);
      chunk_probs.push_back(
          model::Forward(model::AttentionPool(frames, params.attention), params));
    }
    if (chunk_probs.empty()) {
      throw Error(ErrorKind::kEvaluation, "utterance '" + u.id + "' has no usable chunk");
    }
    Prediction p;
    p.probs = AggregateChunks(chunk_probs);
    p.predicted = Argmax(p.probs);
    p.truth = u.dialect;
    predictions.push_back(std::move(p));
  }
  if (predictions.empty()) throw Error(ErrorKind::kEvaluation, "corpus has no eval utterances");
  return predictions;
}

Confusion ConfusionMatrix(std::span<const Prediction> predictions, std::size_t num_classes) {
  Confusion confusion(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (const auto& p : predictions) {
    if (p.truth >= num_classes || p.predicted >= num_classes) {
      throw Error(ErrorKind::kRange, "prediction class out of range");
    }
    ++confusion[p.truth][p.predicted];
  }
  return confusion;
}

double Accuracy(const Confusion& confusion) {
  std::size_t trace = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < confusion.size(); ++r) {
    trace += confusion[r][r];
    for (std::size_t v : confusion[r]) n += v;
  }
  return n == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(n);
}

double WeightedF1(const Confusion& confusion) {
  const std::size_t num_classes = confusion.size();
  std::vector<double> support(num_classes, 0.0), predicted(num_classes, 0.0);
  double n = 0.0;
  for (std::size_t r = 0; r < num_classes; ++r) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      const auto v = static_cast<double>(confusion[r][c]);
      support[r] += v;
      predicted[c] += v;
      n += v;
    }
  }
  if (n == 0.0) return 0.0;
  double wf1 = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (support[c] == 0.0) continue;
    const auto tp = static_cast<double>(confusion[c][c]);
    const double precision = predicted[c] > 0.0 ? tp / predicted[c] : 0.0;
    const double recall = tp / support[c];
    const double f1 = precision + recall > 0.0
                          ? 2.0 * precision * recall / (precision + recall)
                          : 0.0;
    wf1 += support[c] / n * f1;
  }
  return wf1;
}

double ClusterAccuracy(std::span<const Prediction> predictions,
                       const corpus::Taxonomy& taxonomy) {
  if (predictions.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& p : predictions) {
    hits += taxonomy.ClusterOf(p.predicted) == taxonomy.ClusterOf(p.truth) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double ExpectedCalibrationError(std::span<const Prediction> predictions, std::size_t n_bins) {
  if (n_bins == 0) throw Error(ErrorKind::kConfig, "ECE needs at least one bin");
  if (predictions.empty()) return 0.0;
  std::vector<double> confidence_sum(n_bins, 0.0), correct(n_bins, 0.0), count(n_bins, 0.0);
  for (const auto& p : predictions) {
    const double confidence = p.probs.maxCoeff();
    auto bin = static_cast<std::size_t>(confidence * static_cast<double>(n_bins));
    bin = std::min(bin, n_bins - 1);
    confidence_sum[bin] += confidence;
    correct[bin] += p.predicted == p.truth ? 1.0 : 0.0;
    count[bin] += 1.0;
  }
  const auto n = static_cast<double>(predictions.size());
  double ece = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (count[b] == 0.0) continue;
    ece += count[b] / n * std::abs(correct[b] / count[b] - confidence_sum[b] / count[b]);
  }
  return ece;
}

EvalReport BuildReport(std::span<const Prediction> predictions,
                       const corpus::Taxonomy& taxonomy, std::size_t n_bins) {
  EvalReport report;
  report.confusion = ConfusionMatrix(predictions, taxonomy.num_dialects());
  report.n = predictions.size();
  report.acc = Accuracy(report.confusion);
  report.wf1 = WeightedF1(report.confusion);
  report.cluster_acc = ClusterAccuracy(predictions, taxonomy);
  report.ece = ExpectedCalibrationError(predictions, n_bins);
  return report;
}

void WriteReportJson(const EvalReport& report, const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  doc["acc"] = report.acc;
  doc["wf1"] = report.wf1;
  doc["cluster_acc"] = report.cluster_acc;
  doc["ece"] = report.ece;
  doc["n"] = report.n;
  doc["confusion"] = report.confusion;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write report " + path.string());
  out << doc.dump(2) << '\n';
}

void WriteConfusionCsv(const EvalReport& report, const corpus::Taxonomy& taxonomy,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write confusion matrix " + path.string());
  out << "dialect";
  for (const auto& name : taxonomy.dialects()) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < report.confusion.size(); ++r) {
    out << taxonomy.dialects()[r];
    for (std::size_t v : report.confusion[r]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace mapmix::metrics
