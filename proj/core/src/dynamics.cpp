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

#include "mapmix/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mapmix/error.hpp"

namespace mapmix::dynamics {

const char* ToString(Region region) {
  switch (region) {
    case Region::kEasy: return "easy";
    case Region::kAmbiguous: return "ambiguous";
    case Region::kHard: return "hard";
  }
  return "unknown";
}

Region ParseRegion(const std::string& name) {
  if (name == "easy") return Region::kEasy;
  if (name == "ambiguous") return Region::kAmbiguous;
  if (name == "hard") return Region::kHard;
  throw Error(ErrorKind::kFormat, "unknown region '" + name + "'");
}

std::vector<ExampleStats> ComputeStats(const DynamicsLog& log) {
  if (log.probs.size() != log.ids.size()) {
    throw Error(ErrorKind::kLogIntegrity, "ids and probability rows disagree");
  }
  const std::size_t epochs = log.num_epochs();
  if (!log.ids.empty() && epochs == 0) {
    throw Error(ErrorKind::kLogIntegrity, "dynamics log has no epochs");
  }
  std::vector<ExampleStats> stats;
  stats.reserve(log.ids.size());
  for (std::size_t k = 0; k < log.ids.size(); ++k) {
    const auto& row = log.probs[k];
    if (row.size() != epochs) {
      throw Error(ErrorKind::kLogIntegrity, "ragged dynamics row for '" + log.ids[k] + "'");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorKind::kLogIntegrity, "probability outside [0, 1] for '" + log.ids[k] + "'");
      }
      sum += p;
    }
    const double mean = sum / static_cast<double>(epochs);
    double squares = 0.0;
    for (double p : row) squares += (p - mean) * (p - mean);
    stats.push_back({log.ids[k], mean, std::sqrt(squares / static_cast<double>(epochs))});
  }
  return stats;
}

std::vector<std::string> DatamapResult::IdsIn(Region region) const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (e.region == region) out.push_back(e.id);
  }
  return out;
}

std::optional<Region> DatamapResult::RegionOf(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e.region;
  }
  return std::nullopt;
}

double NearestRankPercentile(std::vector<double> values, double fraction) {
  if (values.empty()) throw Error(ErrorKind::kPartition, "percentile of an empty set");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kConfig, "percentile fraction must lie in (0, 1]");
  }
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

DatamapResult PartitionRegions(const std::vector<ExampleStats>& stats,
                               const PartitionConfig& config) {
  if (stats.size() < 3) {
    throw Error(ErrorKind::kPartition, "need at least three examples, got " +
                                           std::to_string(stats.size()));
  }
  DatamapResult result;
  std::vector<double> variabilities;
  variabilities.reserve(stats.size());
  for (const auto& s : stats) variabilities.push_back(s.variability);
  result.v_star = NearestRankPercentile(variabilities, config.variability_percentile);

  std::vector<double> remaining_confidence;
  for (const auto& s : stats) {
    if (s.variability < result.v_star) remaining_confidence.push_back(s.confidence);
  }
  result.mu_star = remaining_confidence.empty()
                       ? std::numeric_limits<double>::quiet_NaN()
                       : NearestRankPercentile(remaining_confidence, config.confidence_percentile);

  result.entries.reserve(stats.size());
  for (const auto& s : stats) {
    Region region = Region::kAmbiguous;
    if (s.variability < result.v_star) {
      region = s.confidence >= result.mu_star ? Region::kEasy : Region::kHard;
    }
    result.entries.push_back({s.id, s.confidence, s.variability, region});
  }
  return result;
}

void ExportDatamap(const DatamapResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write datamap " + path.string());
  out.precision(17);
  out << "id,confidence,variability,region\n";
  for (const auto& e : result.entries) {
    out << e.id << ',' << e.confidence << ',' << e.variability << ',' << ToString(e.region)
        << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed while writing datamap " + path.string());
}

DatamapResult LoadDatamap(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open datamap " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "id,confidence,variability,region") {
    throw Error(ErrorKind::kFormat, "datamap " + path.string() + " has an unexpected header");
  }
  DatamapResult result;
  result.v_star = std::numeric_limits<double>::quiet_NaN();
  result.mu_star = std::numeric_limits<double>::quiet_NaN();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id, confidence, variability, region;
    if (!std::getline(fields, id, ',') || !std::getline(fields, confidence, ',') ||
        !std::getline(fields, variability, ',') || !std::getline(fields, region)) {
      throw Error(ErrorKind::kFormat, "datamap line " + std::to_string(line_no) + " is malformed");
    }
    DatamapEntry entry;
    entry.id = id;
    try {
      entry.confidence = std::stod(confidence);
      entry.variability = std::stod(variability);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kFormat, "datamap line " + std::to_string(line_no) + " has bad numbers");
    }
    entry.region = ParseRegion(region);
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace mapmix::dynamics
