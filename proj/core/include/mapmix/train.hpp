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

#ifndef MAPMIX_TRAIN_HPP_
#define MAPMIX_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mapmix/augment.hpp"
#include "mapmix/corpus.hpp"
#include "mapmix/dynamics.hpp"
#include "mapmix/model.hpp"

namespace mapmix::model {

enum class LabelMode { kOneHot, kConfidence };

const char* ToString(LabelMode mode);
LabelMode ParseLabelMode(const std::string& name);

struct TrainConfig {
  std::size_t epochs = 50;
  double learning_rate = 1e-3;
  double alpha = 0.5;
  std::size_t batch_size = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  augment::Strategy strategy = augment::Strategy::kNone;
  LabelMode label_mode = LabelMode::kOneHot;
  double smoothing_s = 0.1;
  std::uint64_t seed = 0;
};

// Throws kConfig for alpha <= 0, smoothing outside [0, 1), zero batch size or
// a non-positive learning rate.
void ValidateConfig(const TrainConfig& config);

// map_mix always trains on confidence labels.
LabelMode EffectiveLabelMode(const TrainConfig& config);

struct TrainOutput {
  ModelParams params;
  dynamics::DynamicsLog dynamics;
  std::vector<double> loss_curve;
};

// Trains the head on the corpus train split. Each epoch shuffles the
// retained set, builds one mixed point per retained example for mixup
// strategies (latent strategies mix pooled vectors, static mixes frames),
// takes Adam steps on mini-batches, then logs clean true-class
// probabilities of every retained example.
TrainOutput Train(const corpus::Corpus& corpus,
                  const dynamics::DatamapResult* datamap,
                  const TrainConfig& config);

// Fraction of train utterances whose clean prediction matches their label.
double TrainAccuracy(const corpus::Corpus& corpus, const ModelParams& params);

}  // namespace mapmix::model

#endif  // MAPMIX_TRAIN_HPP_
