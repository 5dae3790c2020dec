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

#include "mapmix/labels.hpp"

#include <cmath>

#include "mapmix/error.hpp"

namespace mapmix::labels {

bool OnSimplex(const SoftLabel& label) {
  if (label.size() == 0 || !label.allFinite() || (label.array() < 0.0).any()) return false;
  return std::abs(label.sum() - 1.0) <= kSimplexTolerance;
}

SoftLabel OneHot(std::size_t dialect, std::size_t num_classes) {
  if (dialect >= num_classes) {
    throw Error(ErrorKind::kRange, "dialect " + std::to_string(dialect) +
                                       " out of range for " + std::to_string(num_classes) +
                                       " classes");
  }
  SoftLabel y = SoftLabel::Zero(static_cast<Eigen::Index>(num_classes));
  y[static_cast<Eigen::Index>(dialect)] = 1.0;
  return y;
}

SoftLabel ConfidenceLabel(std::size_t dialect, const corpus::Taxonomy& taxonomy,
                          std::span<const std::size_t> train_counts, double smoothing) {
  const std::size_t num_classes = taxonomy.num_dialects();
  if (dialect >= num_classes) {
    throw Error(ErrorKind::kRange, "dialect " + std::to_string(dialect) + " out of range");
  }
  if (train_counts.size() != num_classes) {
    throw Error(ErrorKind::kSchema, "train counts do not match the taxonomy");
  }
  if (!(smoothing >= 0.0 && smoothing < 1.0)) {
    throw Error(ErrorKind::kRange, "smoothing mass must lie in [0, 1)");
  }
  double sibling_total = 0.0;
  const auto siblings = taxonomy.DialectsIn(taxonomy.ClusterOf(dialect));
  for (std::size_t c : siblings) {
    if (c != dialect) sibling_total += static_cast<double>(train_counts[c]);
  }
  SoftLabel y = OneHot(dialect, num_classes);
  if (sibling_total <= 0.0) return y;

  y[static_cast<Eigen::Index>(dialect)] = 1.0 - smoothing;
  for (std::size_t c : siblings) {
    if (c == dialect || train_counts[c] == 0) continue;
    y[static_cast<Eigen::Index>(c)] =
        smoothing * static_cast<double>(train_counts[c]) / sibling_total;
  }
  return y;
}

SoftLabel MixLabels(const SoftLabel& y_i, const SoftLabel& y_j, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::kRange, "mixing coefficient must lie in [0, 1]");
  }
  if (y_i.size() != y_j.size()) {
    throw Error(ErrorKind::kSchema, "labels have different sizes");
  }
  if (lambda == 1.0) return y_i;
  if (lambda == 0.0) return y_j;
  return lambda * y_i + (1.0 - lambda) * y_j;
}

}  // namespace mapmix::labels
