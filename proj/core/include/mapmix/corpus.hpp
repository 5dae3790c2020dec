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

#ifndef MAPMIX_CORPUS_HPP_
#define MAPMIX_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mapmix/types.hpp"

namespace mapmix::corpus {

// Dialects grouped into language clusters. Dialect and cluster indices are
// positions in the respective lists.
class Taxonomy {
 public:
  Taxonomy() = default;

  // Builds a taxonomy from (dialect, cluster) pairs in order. Clusters are
  // numbered by first appearance. Throws kSchema on duplicate dialects.
  static Taxonomy FromPairs(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  // 14 dialects in 5 clusters, named as in NIST LRE 2017.
  static Taxonomy Default();

  std::size_t num_dialects() const { return dialects_.size(); }
  std::size_t num_clusters() const { return clusters_.size(); }
  const std::vector<std::string>& dialects() const { return dialects_; }
  const std::vector<std::string>& clusters() const { return clusters_; }

  std::size_t ClusterOf(std::size_t dialect) const;
  // Dialect indices belonging to `cluster`, ascending.
  std::vector<std::size_t> DialectsIn(std::size_t cluster) const;
  // Throws kSchema when `name` is not a known dialect.
  std::size_t DialectIndex(const std::string& name) const;

  bool operator==(const Taxonomy&) const = default;

 private:
  std::vector<std::string> dialects_;
  std::vector<std::string> clusters_;
  std::vector<std::size_t> cluster_of_;
};

enum class Split { kTrain, kEval };

struct Utterance {
  std::string id;
  Matrix frames;  // T x D, T >= 1
  std::size_t dialect = 0;
  double duration_s = 0.0;
  Split split = Split::kTrain;

  std::size_t num_frames() const { return static_cast<std::size_t>(frames.rows()); }

  bool operator==(const Utterance&) const;
};

struct Corpus {
  Taxonomy taxonomy;
  std::vector<Utterance> utterances;
  std::size_t dim = 0;
  double frame_rate_hz = 1.0;

  // Indices of utterances in the given split, in corpus order.
  std::vector<std::size_t> IndicesOf(Split split) const;
  // Number of train utterances per dialect.
  std::vector<std::size_t> TrainCounts() const;

  bool operator==(const Corpus&) const = default;
};

// Throws the appropriate corpus error if any invariant is broken: shared
// dimension, finite frames, T >= 1, positive durations, unique ids and valid
// dialect indices.
void Validate(const Corpus& corpus);

inline constexpr char kFramesMagic[4] = {'M', 'M', 'F', 'R'};
inline constexpr std::uint32_t kFramesVersion = 1;

Taxonomy LoadTaxonomy(const std::filesystem::path& path);
void WriteTaxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path);

Corpus LoadCorpus(const std::filesystem::path& manifest_path,
                  const std::filesystem::path& frames_path,
                  const Taxonomy& taxonomy, double frame_rate_hz);

// Frames are written as 32-bit floats; values that are not exactly
// representable in single precision do not survive a round trip.
void WriteCorpus(const Corpus& corpus,
                 const std::filesystem::path& manifest_path,
                 const std::filesystem::path& frames_path);

// Per-dialect duration budget. For each dialect the train utterances are
// shuffled with `seed` and taken until their durations first reach or exceed
// hours_per_dialect * 3600 seconds. Selected utterances keep corpus order;
// eval utterances pass through. Throws kCoverage if a dialect has no train
// utterances.
Corpus SubsampleBudget(const Corpus& corpus, double hours_per_dialect,
                       std::uint64_t seed);

// Rounds every frame value to single precision, matching what the frames
// file stores.
void QuantizeFrames(Corpus& corpus);

}  // namespace mapmix::corpus

#endif  // MAPMIX_CORPUS_HPP_
