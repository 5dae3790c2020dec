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

#ifndef MAPMIX_AUGMENT_HPP_
#define MAPMIX_AUGMENT_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapmix/corpus.hpp"
#include "mapmix/dynamics.hpp"
#include "mapmix/random.hpp"
#include "mapmix/types.hpp"

namespace mapmix::augment {

enum class Strategy {
  kNone,
  kStatic,
  kRandom,
  kWithinCluster,
  kAcrossCluster,
  kEasy,
  kHard,
  kAmbEasy,
  kMapMix,
};

std::string_view ToString(Strategy strategy);
// Throws kConfig for a name outside the catalog.
Strategy ParseStrategy(std::string_view name);
// Every strategy in catalog order.
const std::vector<Strategy>& AllStrategies();

bool IsMixup(Strategy strategy);
bool NeedsDatamap(Strategy strategy);
bool RemovesHard(Strategy strategy);

// Indices refer to the corpus utterance list.
struct MixPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double lambda = 1.0;
};

// Beta(alpha, alpha) draw via two gamma variates; resampled until it lies
// strictly inside (0, 1). Throws kRange for alpha <= 0.
double SampleLambda(double alpha, Rng& rng);

// lambda * first T' frames of a + (1 - lambda) * first T' frames of b, with
// T' = min(T_a, T_b). Throws kSchema on dimension mismatch.
Matrix StaticMix(const Matrix& a, const Matrix& b, double lambda);

// lambda * a + (1 - lambda) * b. Throws kSchema on dimension mismatch.
Vector LatentMix(const Vector& a, const Vector& b, double lambda);

// Train utterance indices kept for `strategy`: amb_easy and map_mix drop the
// hard region. Throws kConfig when the strategy needs a datamap and none (or
// one missing some train ids) is given, kDegenerate when nothing is left.
std::vector<std::size_t> RetainedSet(const corpus::Corpus& corpus,
                                     std::span<const std::size_t> train_indices,
                                     const dynamics::DatamapResult* datamap,
                                     Strategy strategy);

// Samples `n_pairs` pairs over `retained` with a fresh lambda each. Throws
// kStrategy when a region or partner pool the strategy draws from is empty.
std::vector<MixPair> MakePairs(const corpus::Corpus& corpus,
                               std::span<const std::size_t> retained,
                               const dynamics::DatamapResult* datamap,
                               Strategy strategy, std::size_t n_pairs,
                               double alpha, Rng& rng);

}  // namespace mapmix::augment

#endif  // MAPMIX_AUGMENT_HPP_
