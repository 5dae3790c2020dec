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

#ifndef MAPMIX_TESTS_GRADCHECK_HPP_
#define MAPMIX_TESTS_GRADCHECK_HPP_

// Central finite-difference check of model::ComputeGradients.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mapmix/model.hpp"
#include "test_util.hpp"

namespace mapmix::testing {

// Flattened parameter access: attention, then weights (row-major), then bias.
inline double& Coordinate(model::ModelParams& p, Eigen::Index k) {
  const Eigen::Index d = p.attention.size();
  const Eigen::Index wc = p.weights.size();
  if (k < d) return p.attention[k];
  if (k < d + wc) return p.weights.data()[k - d];
  return p.bias[k - d - wc];
}

inline double GradientCoordinate(const model::Gradients& g, Eigen::Index k) {
  const Eigen::Index d = g.attention.size();
  const Eigen::Index wc = g.weights.size();
  if (k < d) return g.attention[k];
  if (k < d + wc) return g.weights.data()[k - d];
  return g.bias[k - d - wc];
}

struct GradInstance {
  std::vector<Matrix> frames;
  std::vector<model::Sample> batch;
  model::ModelParams params;
};

// Mixes single-utterance, latent-mix and fixed-vector samples.
inline GradInstance MakeGradInstance(Rng& rng) {
  GradInstance inst;
  const auto dim = static_cast<Eigen::Index>(2 + rng.Index(5));
  const auto classes = static_cast<Eigen::Index>(2 + rng.Index(5));
  const std::size_t batch_size = 1 + rng.Index(4);
  inst.params = model::InitParams(dim, classes, rng);
  inst.params.bias = RandomVector(classes, rng, 0.5);
  inst.frames.reserve(2 * batch_size);
  for (std::size_t b = 0; b < batch_size; ++b) {
    model::Sample s;
    s.label = RandomSimplex(classes, rng);
    const std::size_t kind = rng.Index(3);
    if (kind == 2) {
      s.pooled = RandomVector(dim, rng);
    } else {
      inst.frames.push_back(
          RandomMatrix(1 + static_cast<Eigen::Index>(rng.Index(6)), dim, rng, 1.5));
      if (kind == 0) {
        s.sources.push_back({&inst.frames.back(), 1.0});
      } else {
        const double lambda = rng.Uniform(0.0, 1.0);
        s.sources.push_back({&inst.frames.back(), lambda});
        inst.frames.push_back(
            RandomMatrix(1 + static_cast<Eigen::Index>(rng.Index(6)), dim, rng, 1.5));
        s.sources.push_back({&inst.frames.back(), 1.0 - lambda});
      }
    }
    inst.batch.push_back(std::move(s));
  }
  return inst;
}

// |a - n| / max(|a|, |n|). The denominator is floored at 1e-5: central
// differences at step 1e-6 carry ~1e-10 of round-off, which would dominate
// the ratio for near-zero coordinates.
inline double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-5});
}

struct GradCheckResult {
  double worst_relative_error = 0.0;
  double worst_loss_mismatch = 0.0;
  int worst_trial = -1;
  Eigen::Index worst_coordinate = -1;
  std::size_t coordinates = 0;
};

inline GradCheckResult CheckGradients(int instances, Rng& rng, double step = 1e-6) {
  GradCheckResult result;
  for (int trial = 0; trial < instances; ++trial) {
    const GradInstance inst = MakeGradInstance(rng);
    const model::Gradients g = model::ComputeGradients(inst.batch, inst.params);
    result.worst_loss_mismatch = std::max(
        result.worst_loss_mismatch, std::abs(g.loss - model::BatchLoss(inst.batch, inst.params)));
    const Eigen::Index n =
        inst.params.attention.size() + inst.params.weights.size() + inst.params.bias.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      model::ModelParams plus = inst.params;
      model::ModelParams minus = inst.params;
      Coordinate(plus, k) += step;
      Coordinate(minus, k) -= step;
      const double numeric =
          (model::BatchLoss(inst.batch, plus) - model::BatchLoss(inst.batch, minus)) / (2 * step);
      const double err = RelativeError(GradientCoordinate(g, k), numeric);
      ++result.coordinates;
      if (err > result.worst_relative_error) {
        result.worst_relative_error = err;
        result.worst_trial = trial;
        result.worst_coordinate = k;
      }
    }
  }
  return result;
}

}  // namespace mapmix::testing

#endif  // MAPMIX_TESTS_GRADCHECK_HPP_
