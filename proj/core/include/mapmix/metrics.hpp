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

#ifndef MAPMIX_METRICS_HPP_
#define MAPMIX_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mapmix/corpus.hpp"
#include "mapmix/model.hpp"
#include "mapmix/types.hpp"

namespace mapmix::metrics {

struct Chunk {
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const Chunk&) const = default;
};

struct ChunkConfig {
  double chunk_len_s = 8.0;
  double stride_s = 3.0;
};

// Windows at 0, stride, 2 * stride, ... while start + chunk_len <= duration;
// a signal shorter than one window is a single chunk covering all of it.
std::vector<Chunk> ChunkOffsets(double duration_s, const ChunkConfig& config = {});

// Arithmetic mean of chunk probability vectors. Throws kEvaluation if empty.
Vector AggregateChunks(std::span<const Vector> chunk_probs);

// Lowest index among the maxima.
std::size_t Argmax(const Vector& probs);

struct Prediction {
  Vector probs;
  std::size_t predicted = 0;
  std::size_t truth = 0;
};

// Chunked inference on the eval split in corpus order. Chunks that map to no
// frames are skipped with a warning on stderr; an utterance with no usable
// chunk is an evaluation error.
std::vector<Prediction> Evaluate(const corpus::Corpus& corpus,
                                 const model::ModelParams& params,
                                 const ChunkConfig& config = {});

using Confusion = std::vector<std::vector<std::size_t>>;

// Rows are true classes, columns predictions.
Confusion ConfusionMatrix(std::span<const Prediction> predictions,
                          std::size_t num_classes);

double Accuracy(const Confusion& confusion);
double WeightedF1(const Confusion& confusion);
double ClusterAccuracy(std::span<const Prediction> predictions,
                       const corpus::Taxonomy& taxonomy);
// Equal-width confidence bins on [0, 1]; bin k is [k/n, (k+1)/n) except the
// last, which is closed on the right.
double ExpectedCalibrationError(std::span<const Prediction> predictions,
                                std::size_t n_bins = 10);

struct EvalReport {
  double acc = 0.0;
  double wf1 = 0.0;
  double cluster_acc = 0.0;
  double ece = 0.0;
  Confusion confusion;
  std::size_t n = 0;
};

EvalReport BuildReport(std::span<const Prediction> predictions,
                       const corpus::Taxonomy& taxonomy, std::size_t n_bins = 10);

void WriteReportJson(const EvalReport& report, const std::filesystem::path& path);
// Header row is the dialect names; each following row is one true dialect.
void WriteConfusionCsv(const EvalReport& report, const corpus::Taxonomy& taxonomy,
                       const std::filesystem::path& path);

}  // namespace mapmix::metrics

#endif  // MAPMIX_METRICS_HPP_
