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

#ifndef MAPMIX_SYNTH_HPP_
#define MAPMIX_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mapmix/corpus.hpp"

namespace mapmix::synth {

// Gaussian dialect corpus: cluster centers sit at random orthogonal
// directions scaled so that pairwise center distance is cluster_sep, and
// each dialect sub-center is offset from its cluster center by dialect_sep.
//
// Every utterance is additionally shifted by a per-utterance Gaussian offset
// of std speaker_noise (constant over its frames), which makes sibling
// dialects overlap the way speaker and channel variation does.
//
// A filler_frac share of each utterance's frames carries no dialect
// information: those frames are drawn around the utterance's cluster center
// only, the way pauses and non-speech frames appear in encoder output. Speech frames
// and filler frames are separated along a dedicated "speech" direction of
// magnitude speech_offset, which attention pooling can learn to exploit.
struct SynthConfig {
  std::size_t n_clusters = 5;
  std::vector<std::size_t> dialects_per_cluster = {4, 2, 2, 4, 2};
  std::size_t dim = 16;
  std::size_t train_per_dialect = 50;
  std::size_t eval_per_dialect = 30;
  std::size_t frames_min = 40;
  std::size_t frames_max = 120;
  double cluster_sep = 6.0;
  double dialect_sep = 2.0;
  double frame_noise = 2.0;
  double speaker_noise = 0.0;
  double filler_frac = 0.0;
  double speech_offset = 3.0;
  double label_noise_frac = 0.0;
  double frame_rate_hz = 4.0;
  std::uint64_t seed = 0;
};

// Mid-difficulty preset used by the CLI defaults and the acceptance checks:
// sibling dialects overlap through speaker_noise, 20% label noise.
SynthConfig BenchmarkConfig();

// Throws kConfig when the configuration is invalid.
void ValidateConfig(const SynthConfig& config);

struct SynthResult {
  corpus::Corpus corpus;
  std::set<std::string> noised_ids;
  // Dialect sub-centers, one row per dialect.
  Matrix sub_centers;
};

// Labels and dialect names come from Taxonomy::Default() when the cluster
// layout matches it, otherwise dialects are named "c<k>-d<m>".
SynthResult Generate(const SynthConfig& config);

}  // namespace mapmix::synth

#endif  // MAPMIX_SYNTH_HPP_
