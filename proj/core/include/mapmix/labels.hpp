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

#ifndef MAPMIX_LABELS_HPP_
#define MAPMIX_LABELS_HPP_

#include <cstddef>
#include <span>

#include "mapmix/corpus.hpp"
#include "mapmix/types.hpp"

namespace mapmix::labels {

// Probability vector over dialect classes.
using SoftLabel = Vector;

inline constexpr double kSimplexTolerance = 1e-9;

// True when every entry is non-negative and the entries sum to one within
// kSimplexTolerance.
bool OnSimplex(const SoftLabel& label);

SoftLabel OneHot(std::size_t dialect, std::size_t num_classes);

// Cluster-aware smoothed label: 1 - s on the true dialect, s spread over the
// sibling dialects of its cluster in proportion to their training counts.
// Siblings with zero count get nothing; with no eligible sibling the label
// is one-hot.
SoftLabel ConfidenceLabel(std::size_t dialect, const corpus::Taxonomy& taxonomy,
                          std::span<const std::size_t> train_counts,
                          double smoothing);

// lambda * y_i + (1 - lambda) * y_j.
SoftLabel MixLabels(const SoftLabel& y_i, const SoftLabel& y_j, double lambda);

}  // namespace mapmix::labels

#endif  // MAPMIX_LABELS_HPP_
