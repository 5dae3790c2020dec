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

#include "mapmix/model.hpp"

#include <cmath>

#include "mapmix/error.hpp"

namespace mapmix::model {
namespace {

struct PoolResult {
  Vector pooled;
  Vector weights;  // attention weights over frames
};

// Attention weights and pooled vector for one frame sequence.
PoolResult Pool(const Matrix& frames, const Vector& attention) {
  if (frames.rows() < 1) throw Error(ErrorKind::kRange, "cannot pool an empty frame sequence");
  if (frames.cols() != attention.size()) {
    throw Error(ErrorKind::kSchema, "frame dimension does not match the attention vector");
  }
  if (!frames.allFinite()) throw Error(ErrorKind::kNumeric, "non-finite frames");
  PoolResult r;
  r.weights = Softmax(frames * attention);
  r.pooled = frames.transpose() * r.weights;
  return r;
}

void ResizeLike(Gradients& g, const ModelParams& params) {
  g.attention = Vector::Zero(params.attention.size());
  g.weights = Matrix::Zero(params.weights.rows(), params.weights.cols());
  g.bias = Vector::Zero(params.bias.size());
}

}  // namespace

bool ModelParams::AllFinite() const {
  return attention.allFinite() && weights.allFinite() && bias.allFinite();
}

bool ModelParams::operator==(const ModelParams& o) const {
  return attention.size() == o.attention.size() && weights.rows() == o.weights.rows() &&
         weights.cols() == o.weights.cols() && bias.size() == o.bias.size() &&
         attention == o.attention && weights == o.weights && bias == o.bias;
}

ModelParams ZeroParams(std::size_t dim, std::size_t num_classes) {
  const auto d = static_cast<Eigen::Index>(dim);
  const auto c = static_cast<Eigen::Index>(num_classes);
  return {Vector::Zero(d), Matrix::Zero(c, d), Vector::Zero(c)};
}

ModelParams InitParams(std::size_t dim, std::size_t num_classes, Rng& rng) {
  ModelParams params = ZeroParams(dim, num_classes);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& x : params.attention) x = rng.Uniform(-bound, bound);
  for (Eigen::Index r = 0; r < params.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < params.weights.cols(); ++c) {
      params.weights(r, c) = rng.Uniform(-bound, bound);
    }
  }
  return params;
}

Vector Softmax(const Vector& logits) {
  const Vector shifted = (logits.array() - logits.maxCoeff()).exp().matrix();
  return shifted / shifted.sum();
}

Vector AttentionPool(const Matrix& frames, const Vector& attention) {
  return Pool(frames, attention).pooled;
}

Vector Forward(const Vector& pooled, const ModelParams& params) {
  if (pooled.size() != params.weights.cols()) {
    throw Error(ErrorKind::kSchema, "pooled dimension does not match the classifier");
  }
  if (!pooled.allFinite()) throw Error(ErrorKind::kNumeric, "non-finite pooled vector");
  return Softmax(params.weights * pooled + params.bias);
}

double Loss(const Vector& probs, const labels::SoftLabel& label) {
  if (probs.size() != label.size()) {
    throw Error(ErrorKind::kSchema, "label size does not match the prediction");
  }
  double loss = 0.0;
  for (Eigen::Index c = 0; c < probs.size(); ++c) {
    if (label[c] != 0.0) loss -= label[c] * std::log(std::max(probs[c], kProbabilityFloor));
  }
  return loss;
}

Vector PooledRepresentation(const Sample& sample, const ModelParams& params) {
  if (sample.sources.empty()) return sample.pooled;
  Vector pooled = Vector::Zero(params.attention.size());
  for (const auto& source : sample.sources) {
    pooled += source.weight * AttentionPool(*source.frames, params.attention);
  }
  return pooled;
}

double Gradients::SquaredNorm() const {
  return attention.squaredNorm() + weights.squaredNorm() + bias.squaredNorm();
}

double BatchLoss(std::span<const Sample> batch, const ModelParams& params) {
  double total = 0.0;
  for (const auto& sample : batch) {
    total += Loss(Forward(PooledRepresentation(sample, params), params), sample.label);
  }
  return total / static_cast<double>(batch.size());
}

Gradients ComputeGradients(std::span<const Sample> batch, const ModelParams& params) {
  if (batch.empty()) throw Error(ErrorKind::kRange, "gradient of an empty batch");
  Gradients g;
  ResizeLike(g, params);
  std::vector<PoolResult> pools;
  for (const auto& sample : batch) {
    pools.clear();
    Vector pooled;
    if (sample.sources.empty()) {
      pooled = sample.pooled;
    } else {
      pooled = Vector::Zero(params.attention.size());
      for (const auto& source : sample.sources) {
        pools.push_back(Pool(*source.frames, params.attention));
        pooled += source.weight * pools.back().pooled;
      }
    }
    const Vector probs = Forward(pooled, params);
    g.loss += Loss(probs, sample.label);
    // d loss / d logits; the label is on the simplex so the usual p - y holds.
    const Vector dlogits = probs - sample.label;
    g.weights.noalias() += dlogits * pooled.transpose();
    g.bias += dlogits;
    if (sample.sources.empty()) continue;

    const Vector dpooled = params.weights.transpose() * dlogits;
    for (std::size_t k = 0; k < sample.sources.size(); ++k) {
      const Matrix& frames = *sample.sources[k].frames;
      const PoolResult& pool = pools[k];
      // d pooled / d score_t = a_t (h_t - pooled_k); d score_t / d w = h_t.
      const Vector centered_dot =
          (frames * dpooled).array() - pool.pooled.dot(dpooled);
      const Vector dscores = pool.weights.cwiseProduct(centered_dot);
      g.attention += sample.sources[k].weight * (frames.transpose() * dscores);
    }
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  g.attention *= scale;
  g.weights *= scale;
  g.bias *= scale;
  g.loss *= scale;
  return g;
}

AdamState AdamState::Zeros(std::size_t dim, std::size_t num_classes) {
  AdamState state;
  const ModelParams shape = ZeroParams(dim, num_classes);
  ResizeLike(state.first_moment, shape);
  ResizeLike(state.second_moment, shape);
  return state;
}

void AdamStep(ModelParams& params, const Gradients& grads, AdamState& state,
              const AdamConfig& config) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = config.beta1 * m + (1.0 - config.beta1) * grad;
    v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
    param.array() -= config.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + config.epsilon);
  };
  update(params.attention, grads.attention, state.first_moment.attention,
         state.second_moment.attention);
  update(params.weights, grads.weights, state.first_moment.weights,
         state.second_moment.weights);
  update(params.bias, grads.bias, state.first_moment.bias, state.second_moment.bias);
}

}  // namespace mapmix::model
