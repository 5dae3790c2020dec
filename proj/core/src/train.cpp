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

#include "mapmix/train.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "mapmix/error.hpp"
#include "mapmix/labels.hpp"
#include "mapmix/random.hpp"

namespace mapmix::model {

const char* ToString(LabelMode mode) {
  return mode == LabelMode::kOneHot ? "one_hot" : "confidence";
}

LabelMode ParseLabelMode(const std::string& name) {
  if (name == "one_hot") return LabelMode::kOneHot;
  if (name == "confidence") return LabelMode::kConfidence;
  throw Error(ErrorKind::kConfig, "unknown label mode '" + name + "'");
}

void ValidateConfig(const TrainConfig& config) {
  if (!(config.alpha > 0.0)) throw Error(ErrorKind::kConfig, "alpha must be positive");
  if (!(config.smoothing_s >= 0.0 && config.smoothing_s < 1.0)) {
    throw Error(ErrorKind::kConfig, "smoothing_s must lie in [0, 1)");
  }
  if (config.batch_size == 0) throw Error(ErrorKind::kConfig, "batch_size must be positive");
  if (!(config.learning_rate > 0.0)) {
    throw Error(ErrorKind::kConfig, "learning_rate must be positive");
  }
}

LabelMode EffectiveLabelMode(const TrainConfig& config) {
  return config.strategy == augment::Strategy::kMapMix ? LabelMode::kConfidence
                                                       : config.label_mode;
}

TrainOutput Train(const corpus::Corpus& corpus, const dynamics::DatamapResult* datamap,
                  const TrainConfig& config) {
  ValidateConfig(config);
  const auto train = corpus.IndicesOf(corpus::Split::kTrain);
  if (train.empty()) throw Error(ErrorKind::kDegenerate, "corpus has no train utterances");
  const std::vector<std::size_t> retained =
      augment::RetainedSet(corpus, train, datamap, config.strategy);

  const corpus::Taxonomy& taxonomy = corpus.taxonomy;
  const std::size_t num_classes = taxonomy.num_dialects();

  // Labels are indexed by corpus position; confidence labels use counts of
  // the retained set.
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t k : retained) ++counts[corpus.utterances[k].dialect];
  const LabelMode label_mode = EffectiveLabelMode(config);
  std::vector<labels::SoftLabel> targets(corpus.utterances.size());
  for (std::size_t k : retained) {
    const std::size_t dialect = corpus.utterances[k].dialect;
    targets[k] = label_mode == LabelMode::kConfidence
                     ? labels::ConfidenceLabel(dialect, taxonomy, counts, config.smoothing_s)
                     : labels::OneHot(dialect, num_classes);
  }

  Rng rng(config.seed);
  TrainOutput out;
  out.params = InitParams(corpus.dim, num_classes, rng);
  out.dynamics.ids.reserve(retained.size());
  for (std::size_t k : retained) out.dynamics.ids.push_back(corpus.utterances[k].id);
  out.dynamics.probs.assign(retained.size(), {});

  AdamState state = AdamState::Zeros(corpus.dim, num_classes);
  const AdamConfig adam{config.learning_rate, config.adam_beta1, config.adam_beta2,
                        config.adam_eps};
  const bool latent = config.strategy != augment::Strategy::kStatic;

  std::vector<std::size_t> order = retained;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<augment::MixPair> pairs;
    if (augment::IsMixup(config.strategy)) {
      pairs = augment::MakePairs(corpus, retained, datamap, config.strategy, retained.size(),
                                 config.alpha, rng);
    } else {
      std::shuffle(order.begin(), order.end(), rng.engine());
    }
    const std::size_t stream_size = pairs.empty() ? order.size() : pairs.size();

    double epoch_loss = 0.0;
    std::vector<Sample> batch;
    std::deque<Matrix> mixed_frames;  // stable addresses for static mixes
    for (std::size_t start = 0; start < stream_size; start += config.batch_size) {
      const std::size_t end = std::min(stream_size, start + config.batch_size);
      batch.clear();
      mixed_frames.clear();
      for (std::size_t n = start; n < end; ++n) {
        Sample sample;
        if (pairs.empty()) {
          const std::size_t k = order[n];
          sample.sources.push_back({&corpus.utterances[k].frames, 1.0});
          sample.label = targets[k];
        } else {
          const auto& pair = pairs[n];
          const auto& frames_i = corpus.utterances[pair.i].frames;
          const auto& frames_j = corpus.utterances[pair.j].frames;
          if (latent) {
            sample.sources.push_back({&frames_i, pair.lambda});
            sample.sources.push_back({&frames_j, 1.0 - pair.lambda});
          } else {
            mixed_frames.push_back(augment::StaticMix(frames_i, frames_j, pair.lambda));
            sample.sources.push_back({&mixed_frames.back(), 1.0});
          }
          sample.label = labels::MixLabels(targets[pair.i], targets[pair.j], pair.lambda);
        }
        batch.push_back(std::move(sample));
      }
      const Gradients grads = ComputeGradients(batch, out.params);
      epoch_loss += grads.loss * static_cast<double>(batch.size());
      AdamStep(out.params, grads, state, adam);
      if (!out.params.AllFinite()) {
        throw Error(ErrorKind::kNumeric, "parameters diverged in epoch " + std::to_string(epoch));
      }
    }
    out.loss_curve.push_back(epoch_loss / static_cast<double>(stream_size));

    for (std::size_t r = 0; r < retained.size(); ++r) {
      const auto& u = corpus.utterances[retained[r]];
      const Vector probs = Forward(AttentionPool(u.frames, out.params.attention), out.params);
      out.dynamics.probs[r].push_back(probs[static_cast<Eigen::Index>(u.dialect)]);
    }
  }
  if (config.epochs == 0) out.dynamics = {};
  return out;
}

double TrainAccuracy(const corpus::Corpus& corpus, const ModelParams& params) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& u : corpus.utterances) {
    if (u.split != corpus::Split::kTrain) continue;
    const Vector probs = Forward(AttentionPool(u.frames, params.attention), params);
    Eigen::Index best = 0;
    probs.maxCoeff(&best);
    correct += static_cast<std::size_t>(best) == u.dialect ? 1 : 0;
    ++total;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace mapmix::model
