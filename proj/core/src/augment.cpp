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

#include "mapmix/augment.hpp"

#include <algorithm>
#include <unordered_map>

#include "mapmix/error.hpp"

namespace mapmix::augment {
namespace {

using dynamics::Region;

struct NamedStrategy {
  Strategy strategy;
  std::string_view name;
};

constexpr NamedStrategy kCatalog[] = {
    {Strategy::kNone, "none"},
    {Strategy::kStatic, "static"},
    {Strategy::kRandom, "random"},
    {Strategy::kWithinCluster, "within_cluster"},
    {Strategy::kAcrossCluster, "across_cluster"},
    {Strategy::kEasy, "easy"},
    {Strategy::kHard, "hard"},
    {Strategy::kAmbEasy, "amb_easy"},
    {Strategy::kMapMix, "map_mix"},
};

std::unordered_map<std::string, Region> RegionIndex(const dynamics::DatamapResult& datamap) {
  std::unordered_map<std::string, Region> index;
  for (const auto& e : datamap.entries) index.emplace(e.id, e.region);
  return index;
}

Region RegionOrThrow(const std::unordered_map<std::string, Region>& index,
                     const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) {
    throw Error(ErrorKind::kConfig, "datamap does not cover train utterance '" + id + "'");
  }
  return it->second;
}

}  // namespace

std::string_view ToString(Strategy strategy) {
  for (const auto& entry : kCatalog) {
    if (entry.strategy == strategy) return entry.name;
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  for (const auto& entry : kCatalog) {
    if (entry.name == name) return entry.strategy;
  }
  throw Error(ErrorKind::kConfig, "unknown strategy '" + std::string(name) + "'");
}

const std::vector<Strategy>& AllStrategies() {
  static const std::vector<Strategy> all = [] {
    std::vector<Strategy> out;
    for (const auto& entry : kCatalog) out.push_back(entry.strategy);
    return out;
  }();
  return all;
}

bool IsMixup(Strategy strategy) { return strategy != Strategy::kNone; }

bool NeedsDatamap(Strategy strategy) {
  return strategy == Strategy::kEasy || strategy == Strategy::kHard ||
         strategy == Strategy::kAmbEasy || strategy == Strategy::kMapMix;
}

bool RemovesHard(Strategy strategy) {
  return strategy == Strategy::kAmbEasy || strategy == Strategy::kMapMix;
}

double SampleLambda(double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::kRange, "Beta parameter must be positive");
  while (true) {
    const double x = rng.Gamma(alpha);
    const double y = rng.Gamma(alpha);
    if (x + y == 0.0) continue;
    const double lambda = x / (x + y);
    if (lambda > 0.0 && lambda < 1.0) return lambda;
  }
}

Matrix StaticMix(const Matrix& a, const Matrix& b, double lambda) {
  if (a.cols() != b.cols()) throw Error(ErrorKind::kSchema, "static mix of different dimensions");
  const Eigen::Index rows = std::min(a.rows(), b.rows());
  if (lambda == 1.0) return a.topRows(rows);
  if (lambda == 0.0) return b.topRows(rows);
  return lambda * a.topRows(rows) + (1.0 - lambda) * b.topRows(rows);
}

Vector LatentMix(const Vector& a, const Vector& b, double lambda) {
  if (a.size() != b.size()) throw Error(ErrorKind::kSchema, "latent mix of different dimensions");
  if (lambda == 1.0) return a;
  if (lambda == 0.0) return b;
  return lambda * a + (1.0 - lambda) * b;
}

std::vector<std::size_t> RetainedSet(const corpus::Corpus& corpus,
                                     std::span<const std::size_t> train_indices,
                                     const dynamics::DatamapResult* datamap,
                                     Strategy strategy) {
  std::vector<std::size_t> retained(train_indices.begin(), train_indices.end());
  if (NeedsDatamap(strategy)) {
    if (datamap == nullptr) {
      throw Error(ErrorKind::kConfig, "strategy " + std::string(ToString(strategy)) +
                                          " requires a datamap");
    }
    const auto index = RegionIndex(*datamap);
    for (std::size_t k : retained) RegionOrThrow(index, corpus.utterances[k].id);
    if (RemovesHard(strategy)) {
      std::erase_if(retained, [&](std::size_t k) {
        return index.at(corpus.utterances[k].id) == Region::kHard;
      });
    }
  }
  if (retained.empty()) {
    throw Error(ErrorKind::kDegenerate, "no training utterances left for strategy " +
                                            std::string(ToString(strategy)));
  }
  return retained;
}

std::vector<MixPair> MakePairs(const corpus::Corpus& corpus,
                               std::span<const std::size_t> retained,
                               const dynamics::DatamapResult* datamap,
                               Strategy strategy, std::size_t n_pairs, double alpha,
                               Rng& rng) {
  if (strategy == Strategy::kNone) {
    throw Error(ErrorKind::kConfig, "strategy none does not build mixup pairs");
  }
  if (retained.empty()) throw Error(ErrorKind::kDegenerate, "empty retained set");
  if (!(alpha > 0.0)) throw Error(ErrorKind::kRange, "Beta parameter must be positive");

  std::vector<std::size_t> easy, ambiguous, hard;
  if (NeedsDatamap(strategy)) {
    if (datamap == nullptr) {
      throw Error(ErrorKind::kConfig, "strategy " + std::string(ToString(strategy)) +
                                          " requires a datamap");
    }
    const auto index = RegionIndex(*datamap);
    for (std::size_t k : retained) {
      switch (RegionOrThrow(index, corpus.utterances[k].id)) {
        case Region::kEasy: easy.push_back(k); break;
        case Region::kAmbiguous: ambiguous.push_back(k); break;
        case Region::kHard: hard.push_back(k); break;
      }
    }
  }
  auto require = [&](const std::vector<std::size_t>& pool, const char* what) {
    if (pool.empty()) {
      throw Error(ErrorKind::kStrategy, "strategy " + std::string(ToString(strategy)) +
                                            " needs a non-empty " + what + " region");
    }
  };

  // Partner pools per cluster for the cluster-constrained strategies.
  const corpus::Taxonomy& taxonomy = corpus.taxonomy;
  std::vector<std::vector<std::size_t>> in_cluster(taxonomy.num_clusters());
  std::vector<std::vector<std::size_t>> outside_cluster(taxonomy.num_clusters());
  if (strategy == Strategy::kWithinCluster || strategy == Strategy::kAcrossCluster) {
    for (std::size_t k : retained) {
      const std::size_t cluster = taxonomy.ClusterOf(corpus.utterances[k].dialect);
      for (std::size_t c = 0; c < taxonomy.num_clusters(); ++c) {
        (c == cluster ? in_cluster[c] : outside_cluster[c]).push_back(k);
      }
    }
  }

  switch (strategy) {
    case Strategy::kEasy: require(easy, "easy"); break;
    case Strategy::kHard: require(hard, "hard"); break;
    case Strategy::kAmbEasy:
    case Strategy::kMapMix:
      require(easy, "easy");
      require(ambiguous, "ambiguous");
      break;
    default: break;
  }

  auto pick = [&](const std::vector<std::size_t>& pool) { return pool[rng.Index(pool.size())]; };
  std::vector<MixPair> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t n = 0; n < n_pairs; ++n) {
    MixPair pair;
    switch (strategy) {
      case Strategy::kStatic:
      case Strategy::kRandom:
        pair.i = retained[rng.Index(retained.size())];
        pair.j = retained[rng.Index(retained.size())];
        break;
      case Strategy::kWithinCluster:
      case Strategy::kAcrossCluster: {
        pair.i = retained[rng.Index(retained.size())];
        const std::size_t cluster = taxonomy.ClusterOf(corpus.utterances[pair.i].dialect);
        const auto& pool = strategy == Strategy::kWithinCluster ? in_cluster[cluster]
                                                                : outside_cluster[cluster];
        if (pool.empty()) {
          throw Error(ErrorKind::kStrategy, "no retained utterance outside cluster '" +
                                                taxonomy.clusters()[cluster] + "'");
        }
        pair.j = pick(pool);
        break;
      }
      case Strategy::kEasy:
        pair.i = retained[rng.Index(retained.size())];
        pair.j = pick(easy);
        break;
      case Strategy::kHard:
        pair.i = retained[rng.Index(retained.size())];
        pair.j = pick(hard);
        break;
      case Strategy::kAmbEasy:
      case Strategy::kMapMix:
        pair.i = pick(easy);
        pair.j = pick(ambiguous);
        break;
      case Strategy::kNone:
        break;
    }
    pair.lambda = SampleLambda(alpha, rng);
    pairs.push_back(pair);
  }
  return pairs;
}

}  // namespace mapmix::augment
