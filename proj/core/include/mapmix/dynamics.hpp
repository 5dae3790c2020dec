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

#ifndef MAPMIX_DYNAMICS_HPP_
#define MAPMIX_DYNAMICS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mapmix::dynamics {

// Per-epoch true-class probabilities of every tracked training example.
// ids[k] owns row k of `probs`; each row holds one value per epoch.
struct DynamicsLog {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> probs;

  std::size_t num_examples() const { return ids.size(); }
  // Epoch count; 0 for an empty log.
  std::size_t num_epochs() const { return probs.empty() ? 0 : probs.front().size(); }
};

enum class Region { kEasy, kAmbiguous, kHard };

const char* ToString(Region region);
// Throws kFormat on an unknown name.
Region ParseRegion(const std::string& name);

struct ExampleStats {
  std::string id;
  double confidence = 0.0;
  double variability = 0.0;
};

// Mean and population standard deviation of each example's probabilities.
// Throws kLogIntegrity for ragged rows, out-of-range values or zero epochs.
std::vector<ExampleStats> ComputeStats(const DynamicsLog& log);

struct DatamapEntry {
  std::string id;
  double confidence = 0.0;
  double variability = 0.0;
  Region region = Region::kEasy;
};

struct PartitionConfig {
  // Nearest-rank percentile of variability at and above which an example is
  // ambiguous. 0.667 leaves the top third (rounded up) ambiguous.
  double variability_percentile = 0.667;
  // Nearest-rank percentile of confidence, among the rest, at and above
  // which an example is easy.
  double confidence_percentile = 0.5;
};

struct DatamapResult {
  std::vector<DatamapEntry> entries;
  double v_star = 0.0;
  // NaN when every entry is ambiguous.
  double mu_star = 0.0;

  std::vector<std::string> IdsIn(Region region) const;
  std::optional<Region> RegionOf(const std::string& id) const;
};

// Nearest-rank percentile of `values`; fraction in (0, 1].
double NearestRankPercentile(std::vector<double> values, double fraction);

// Two-stage split: high variability is ambiguous; the remainder is easy at or
// above the confidence cut and hard below it. Throws kPartition for fewer than
// three entries.
DatamapResult PartitionRegions(const std::vector<ExampleStats>& stats,
                               const PartitionConfig& config = {});

// CSV `id,confidence,variability,region`, 17 significant digits, input order.
void ExportDatamap(const DatamapResult& result, const std::filesystem::path& path);
// Thresholds are not stored in the CSV and come back as NaN.
DatamapResult LoadDatamap(const std::filesystem::path& path);

}  // namespace mapmix::dynamics

#endif  // MAPMIX_DYNAMICS_HPP_
