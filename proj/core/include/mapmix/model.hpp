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

#ifndef MAPMIX_MODEL_HPP_
#define MAPMIX_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mapmix/labels.hpp"
#include "mapmix/random.hpp"
#include "mapmix/types.hpp"

namespace mapmix::model {

// Attention-pooled linear softmax head over frame embeddings.
struct ModelParams {
  Vector attention;   // D, scoring vector for self-attention pooling
  Matrix weights;     // C x D classifier weights
  Vector bias;        // C

  std::size_t dim() const { return static_cast<std::size_t>(attention.size()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(bias.size()); }
  bool AllFinite() const;

  bool operator==(const ModelParams&) const;
};

ModelParams ZeroParams(std::size_t dim, std::size_t num_classes);

// attention and weights uniform in (-1/sqrt(D), 1/sqrt(D)), bias zero.
ModelParams InitParams(std::size_t dim, std::size_t num_classes, Rng& rng);

// Stable softmax with max subtraction.
Vector Softmax(const Vector& logits);

// softmax(frames * w)-weighted sum of frames. Throws kRange for an empty
// sequence and kNumeric for non-finite frames.
Vector AttentionPool(const Matrix& frames, const Vector& attention);

// softmax(W * pooled + b).
Vector Forward(const Vector& pooled, const ModelParams& params);

inline constexpr double kProbabilityFloor = 1e-12;

// Soft-label cross-entropy with probabilities clamped below at
// kProbabilityFloor.
double Loss(const Vector& probs, const labels::SoftLabel& label);

// One pooled source of a training input.
struct WeightedFrames {
  const Matrix* frames = nullptr;
  double weight = 1.0;
};

// A training input. The pooled representation is
//   sum_k sources[k].weight * AttentionPool(*sources[k].frames, w)
// or, when `sources` is empty, the fixed vector `pooled`. A latent mix of
// two utterances is two sources with weights lambda and 1 - lambda.
struct Sample {
  std::vector<WeightedFrames> sources;
  Vector pooled;
  labels::SoftLabel label;
};

Vector PooledRepresentation(const Sample& sample, const ModelParams& params);

struct Gradients {
  Vector attention;
  Matrix weights;
  Vector bias;
  // Mean batch loss at the parameters the gradient was taken at.
  double loss = 0.0;

  double SquaredNorm() const;
};

// Mean cross-entropy over `batch`.
double BatchLoss(std::span<const Sample> batch, const ModelParams& params);

// Analytic gradient of BatchLoss. Fixed-vector samples contribute nothing to
// the attention gradient. Contributions are summed in batch order.
Gradients ComputeGradients(std::span<const Sample> batch,
                           const ModelParams& params);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  std::uint64_t step = 0;

  static AdamState Zeros(std::size_t dim, std::size_t num_classes);
};

// In-place Adam update with bias correction.
void AdamStep(ModelParams& params, const Gradients& grads, AdamState& state,
              const AdamConfig& config);

}  // namespace mapmix::model

#endif  // MAPMIX_MODEL_HPP_
