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

#include "mapmix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mapmix/error.hpp"
#include "mapmix/random.hpp"

namespace mapmix::synth {
namespace {

double ToFloatPrecision(double x) { return static_cast<double>(static_cast<float>(x)); }

corpus::Taxonomy MakeTaxonomy(const SynthConfig& config) {
  corpus::Taxonomy preset = corpus::Taxonomy::Default();
  bool matches = preset.num_clusters() == config.n_clusters;
  for (std::size_t k = 0; matches && k < config.n_clusters; ++k) {
    matches = preset.DialectsIn(k).size() == config.dialects_per_cluster[k];
  }
  if (matches) return preset;

  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t k = 0; k < config.n_clusters; ++k) {
    for (std::size_t m = 0; m < config.dialects_per_cluster[k]; ++m) {
      pairs.emplace_back("c" + std::to_string(k) + "-d" + std::to_string(m),
                         "cluster" + std::to_string(k));
    }
  }
  return corpus::Taxonomy::FromPairs(pairs);
}

std::string MakeId(const std::string& dialect, const char* split, std::size_t k) {
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "%04zu", k);
  return dialect + "-" + split + "-" + suffix;
}

}  // namespace

SynthConfig BenchmarkConfig() {
  SynthConfig c;
  c.frame_noise = 1.0;
  c.speaker_noise = 0.5;
  c.label_noise_frac = 0.2;
  return c;
}

void ValidateConfig(const SynthConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kConfig, what); };
  if (c.n_clusters == 0) fail("n_clusters must be positive");
  if (c.dialects_per_cluster.size() != c.n_clusters) {
    fail("dialects_per_cluster has " + std::to_string(c.dialects_per_cluster.size()) +
         " entries for " + std::to_string(c.n_clusters) + " clusters");
  }
  for (std::size_t n : c.dialects_per_cluster) {
    if (n == 0) fail("every cluster needs at least one dialect");
  }
  if (c.dim < c.n_clusters + 1) fail("dim must exceed n_clusters");
  if (c.train_per_dialect == 0) fail("train_per_dialect must be positive");
  if (c.frames_min == 0 || c.frames_min > c.frames_max) fail("invalid frames range");
  if (!(c.dialect_sep > 0.0) || !(c.cluster_sep > c.dialect_sep)) {
    fail("need cluster_sep > dialect_sep > 0");
  }
  if (!(c.frame_noise >= 0.0)) fail("frame_noise must be non-negative");
  if (!(c.speaker_noise >= 0.0)) fail("speaker_noise must be non-negative");
  if (!(c.filler_frac >= 0.0 && c.filler_frac < 1.0)) fail("filler_frac must lie in [0, 1)");
  if (!(c.label_noise_frac >= 0.0 && c.label_noise_frac < 0.5)) {
    fail("label_noise_frac must lie in [0, 0.5)");
  }
  if (!(c.frame_rate_hz > 0.0)) fail("frame_rate_hz must be positive");
}

SynthResult Generate(const SynthConfig& config) {
  ValidateConfig(config);
  Rng rng(config.seed);
  const std::size_t dim = config.dim;

  SynthResult result;
  corpus::Corpus& corpus = result.corpus;
  corpus.taxonomy = MakeTaxonomy(config);
  corpus.dim = dim;
  corpus.frame_rate_hz = config.frame_rate_hz;
  const std::size_t num_dialects = corpus.taxonomy.num_dialects();

  // Orthonormal basis: the first n_clusters columns place cluster centers,
  // the next one is the speech/filler axis.
  Matrix gaussian(dim, dim);
  for (Eigen::Index r = 0; r < gaussian.rows(); ++r) {
    for (Eigen::Index c = 0; c < gaussian.cols(); ++c) gaussian(r, c) = rng.Normal();
  }
  const Matrix basis = Eigen::HouseholderQR<Matrix>(gaussian).householderQ();
  const Vector speech_axis = basis.col(static_cast<Eigen::Index>(config.n_clusters));

  result.sub_centers.resize(num_dialects, dim);
  Matrix filler_centers(num_dialects, dim);
  for (std::size_t d = 0; d < num_dialects; ++d) {
    const auto cluster = static_cast<Eigen::Index>(corpus.taxonomy.ClusterOf(d));
    Vector offset(dim);
    for (auto& x : offset) x = rng.Normal();
    offset -= offset.dot(speech_axis) * speech_axis;
    offset.normalize();
    const Vector center = config.cluster_sep / std::sqrt(2.0) * basis.col(cluster) +
                          config.dialect_sep * offset +
                          config.speech_offset * speech_axis;
    result.sub_centers.row(static_cast<Eigen::Index>(d)) =
        center.unaryExpr(&ToFloatPrecision).transpose();
    const Vector filler = config.cluster_sep / std::sqrt(2.0) * basis.col(cluster) -
                          config.speech_offset * speech_axis;
    filler_centers.row(static_cast<Eigen::Index>(d)) =
        filler.unaryExpr(&ToFloatPrecision).transpose();
  }

  auto make_utterance = [&](std::size_t dialect, corpus::Split split, std::size_t k) {
    corpus::Utterance u;
    u.id = MakeId(corpus.taxonomy.dialects()[dialect],
                  split == corpus::Split::kTrain ? "train" : "eval", k);
    u.dialect = dialect;
    u.split = split;
    const std::size_t num_frames =
        config.frames_min + rng.Index(config.frames_max - config.frames_min + 1);
    std::size_t num_filler = static_cast<std::size_t>(
        std::llround(config.filler_frac * static_cast<double>(num_frames)));
    num_filler = std::min(num_filler, num_frames - 1);
    std::vector<bool> filler(num_frames, false);
    std::fill(filler.begin(), filler.begin() + static_cast<std::ptrdiff_t>(num_filler), true);
    std::shuffle(filler.begin(), filler.end(), rng.engine());

    Vector speaker(dim);
    for (auto& x : speaker) x = config.speaker_noise * rng.Normal();
    u.frames.resize(static_cast<Eigen::Index>(num_frames), static_cast<Eigen::Index>(dim));
    for (std::size_t t = 0; t < num_frames; ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      if (filler[t]) {
        u.frames.row(row) = filler_centers.row(static_cast<Eigen::Index>(dialect));
      } else {
        u.frames.row(row) = result.sub_centers.row(static_cast<Eigen::Index>(dialect));
      }
      u.frames.row(row) += speaker.transpose();
      for (Eigen::Index c = 0; c < u.frames.cols(); ++c) {
        u.frames(row, c) = ToFloatPrecision(u.frames(row, c) + config.frame_noise * rng.Normal());
      }
    }
    u.duration_s = static_cast<double>(num_frames) / config.frame_rate_hz;
    return u;
  };

  for (std::size_t d = 0; d < num_dialects; ++d) {
    for (std::size_t k = 0; k < config.train_per_dialect; ++k) {
      corpus.utterances.push_back(make_utterance(d, corpus::Split::kTrain, k));
    }
  }
  for (std::size_t d = 0; d < num_dialects; ++d) {
    for (std::size_t k = 0; k < config.eval_per_dialect; ++k) {
      corpus.utterances.push_back(make_utterance(d, corpus::Split::kEval, k));
    }
  }

  std::vector<std::size_t> train = corpus.IndicesOf(corpus::Split::kTrain);
  const auto num_noised = static_cast<std::size_t>(
      std::llround(config.label_noise_frac * static_cast<double>(train.size())));
  if (num_noised > 0 && num_dialects < 2) {
    throw Error(ErrorKind::kConfig, "label noise needs at least two dialects");
  }
  std::shuffle(train.begin(), train.end(), rng.engine());
  for (std::size_t k = 0; k < num_noised; ++k) {
    auto& u = corpus.utterances[train[k]];
    const std::size_t draw = rng.Index(num_dialects - 1);
    u.dialect = draw >= u.dialect ? draw + 1 : draw;
    result.noised_ids.insert(u.id);
  }
  return result;
}

}  // namespace mapmix::synth
