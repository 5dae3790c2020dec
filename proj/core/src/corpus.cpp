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

#include "mapmix/corpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "mapmix/error.hpp"
#include "mapmix/random.hpp"

namespace mapmix::corpus {
namespace {

static_assert(std::endian::native == std::endian::little,
              "frames file I/O assumes a little-endian host");

using OrderedJson = nlohmann::ordered_json;

void PutU32(std::ostream& out, std::uint32_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

bool GetU32(std::istream& in, std::uint32_t& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(value)));
}

const char* SplitName(Split split) { return split == Split::kTrain ? "train" : "eval"; }

Split ParseSplit(const std::string& name, std::size_t line) {
  if (name == "train") return Split::kTrain;
  if (name == "eval") return Split::kEval;
  throw Error(ErrorKind::kSchema, "manifest line " + std::to_string(line) +
                                      ": unknown split '" + name + "'");
}

}  // namespace

Taxonomy Taxonomy::FromPairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  Taxonomy taxonomy;
  std::unordered_map<std::string, std::size_t> cluster_index;
  std::unordered_set<std::string> seen;
  for (const auto& [dialect, cluster] : pairs) {
    if (!seen.insert(dialect).second) {
      throw Error(ErrorKind::kSchema, "duplicate dialect '" + dialect + "'");
    }
    auto [it, inserted] = cluster_index.emplace(cluster, taxonomy.clusters_.size());
    if (inserted) taxonomy.clusters_.push_back(cluster);
    taxonomy.dialects_.push_back(dialect);
    taxonomy.cluster_of_.push_back(it->second);
  }
  return taxonomy;
}

Taxonomy Taxonomy::Default() {
  return FromPairs({
      {"ara-acm", "Arabic"},  {"ara-apc", "Arabic"},  {"ara-ary", "Arabic"},
      {"ara-arz", "Arabic"},  {"zho-cmn", "Chinese"}, {"zho-nan", "Chinese"},
      {"eng-gbr", "English"}, {"eng-usg", "English"}, {"spa-car", "Iberian"},
      {"spa-eur", "Iberian"}, {"spa-lac", "Iberian"}, {"por-brz", "Iberian"},
      {"qsl-pol", "Slavic"},  {"qsl-rus", "Slavic"},
  });
}

std::size_t Taxonomy::ClusterOf(std::size_t dialect) const {
  if (dialect >= cluster_of_.size()) {
    throw Error(ErrorKind::kRange, "dialect index " + std::to_string(dialect) +
                                       " out of range");
  }
  return cluster_of_[dialect];
}

std::vector<std::size_t> Taxonomy::DialectsIn(std::size_t cluster) const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < cluster_of_.size(); ++d) {
    if (cluster_of_[d] == cluster) out.push_back(d);
  }
  return out;
}

std::size_t Taxonomy::DialectIndex(const std::string& name) const {
  auto it = std::find(dialects_.begin(), dialects_.end(), name);
  if (it == dialects_.end()) {
    throw Error(ErrorKind::kSchema, "dialect '" + name + "' is not in the taxonomy");
  }
  return static_cast<std::size_t>(it - dialects_.begin());
}

bool Utterance::operator==(const Utterance& other) const {
  return id == other.id && dialect == other.dialect &&
         duration_s == other.duration_s && split == other.split &&
         frames.rows() == other.frames.rows() &&
         frames.cols() == other.frames.cols() && frames == other.frames;
}

std::vector<std::size_t> Corpus::IndicesOf(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < utterances.size(); ++k) {
    if (utterances[k].split == split) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> Corpus::TrainCounts() const {
  std::vector<std::size_t> counts(taxonomy.num_dialects(), 0);
  for (const auto& u : utterances) {
    if (u.split == Split::kTrain) ++counts.at(u.dialect);
  }
  return counts;
}

void Validate(const Corpus& corpus) {
  std::unordered_set<std::string> ids;
  for (const auto& u : corpus.utterances) {
    if (!ids.insert(u.id).second) {
      throw Error(ErrorKind::kSchema, "duplicate utterance id '" + u.id + "'");
    }
    if (u.dialect >= corpus.taxonomy.num_dialects()) {
      throw Error(ErrorKind::kSchema, "utterance '" + u.id + "' has invalid dialect index");
    }
    if (u.frames.rows() < 1) {
      throw Error(ErrorKind::kSchema, "utterance '" + u.id + "' has no frames");
    }
    if (static_cast<std::size_t>(u.frames.cols()) != corpus.dim) {
      throw Error(ErrorKind::kSchema, "utterance '" + u.id + "' has dimension " +
                                          std::to_string(u.frames.cols()) +
                                          ", corpus has " + std::to_string(corpus.dim));
    }
    if (!u.frames.allFinite()) {
      throw Error(ErrorKind::kNumeric, "utterance '" + u.id + "' has non-finite frames");
    }
    if (!(u.duration_s > 0.0) || !std::isfinite(u.duration_s)) {
      throw Error(ErrorKind::kSchema, "utterance '" + u.id + "' has non-positive duration");
    }
  }
  if (!(corpus.frame_rate_hz > 0.0)) {
    throw Error(ErrorKind::kSchema, "frame rate must be positive");
  }
}

Taxonomy LoadTaxonomy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open taxonomy " + path.string());
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, "taxonomy " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || doc.empty()) {
    throw Error(ErrorKind::kFormat, "taxonomy must be a non-empty JSON object");
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [dialect, cluster] : doc.items()) {
    if (!cluster.is_string()) {
      throw Error(ErrorKind::kFormat, "taxonomy cluster for '" + dialect + "' is not a string");
    }
    pairs.emplace_back(dialect, cluster.get<std::string>());
  }
  return Taxonomy::FromPairs(pairs);
}

void WriteTaxonomy(const Taxonomy& taxonomy, const std::filesystem::path& path) {
  OrderedJson doc = OrderedJson::object();
  for (std::size_t d = 0; d < taxonomy.num_dialects(); ++d) {
    doc[taxonomy.dialects()[d]] = taxonomy.clusters()[taxonomy.ClusterOf(d)];
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write taxonomy " + path.string());
  out << doc.dump(2) << '\n';
}

Corpus LoadCorpus(const std::filesystem::path& manifest_path,
                  const std::filesystem::path& frames_path,
                  const Taxonomy& taxonomy, double frame_rate_hz) {
  std::ifstream frames(frames_path, std::ios::binary);
  if (!frames) throw Error(ErrorKind::kIo, "cannot open frames file " + frames_path.string());
  char magic[4];
  std::uint32_t version = 0;
  std::uint32_t dim = 0;
  if (!frames.read(magic, 4) || std::memcmp(magic, kFramesMagic, 4) != 0) {
    throw Error(ErrorKind::kFormat, "frames file has wrong magic bytes");
  }
  if (!GetU32(frames, version) || version != kFramesVersion) {
    throw Error(ErrorKind::kFormat, "unsupported frames file version");
  }
  if (!GetU32(frames, dim) || dim == 0) {
    throw Error(ErrorKind::kFormat, "frames file has invalid dimension");
  }
  frames.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(frames.tellg());

  std::ifstream manifest(manifest_path);
  if (!manifest) throw Error(ErrorKind::kIo, "cannot open manifest " + manifest_path.string());

  Corpus corpus;
  corpus.taxonomy = taxonomy;
  corpus.dim = dim;
  corpus.frame_rate_hz = frame_rate_hz;

  std::string line;
  std::size_t line_no = 0;
  std::vector<float> buffer;
  while (std::getline(manifest, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormat, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    Utterance u;
    std::uint64_t offset = 0;
    std::uint64_t num_frames = 0;
    try {
      u.id = record.at("id").get<std::string>();
      u.dialect = taxonomy.DialectIndex(record.at("dialect").get<std::string>());
      offset = record.at("offset").get<std::uint64_t>();
      num_frames = record.at("num_frames").get<std::uint64_t>();
      u.duration_s = record.at("duration_s").get<double>();
      u.split = ParseSplit(record.at("split").get<std::string>(), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormat, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::uint64_t payload = 4 + num_frames * dim * 4;
    if (offset < 12 || offset > file_size || payload > file_size - offset) {
      throw Error(ErrorKind::kCorruption, "utterance '" + u.id + "' record at offset " +
                                              std::to_string(offset) +
                                              " exceeds the frames file");
    }
    frames.clear();
    frames.seekg(static_cast<std::streamoff>(offset));
    std::uint32_t stored_frames = 0;
    if (!GetU32(frames, stored_frames) || stored_frames != num_frames) {
      throw Error(ErrorKind::kCorruption, "utterance '" + u.id +
                                              "' frame count disagrees with the manifest");
    }
    buffer.resize(num_frames * dim);
    if (!frames.read(reinterpret_cast<char*>(buffer.data()),
                     static_cast<std::streamsize>(buffer.size() * sizeof(float)))) {
      throw Error(ErrorKind::kCorruption, "utterance '" + u.id + "' frames are truncated");
    }
    u.frames = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(buffer.data(), num_frames, dim)
                   .cast<double>();
    corpus.utterances.push_back(std::move(u));
  }
  Validate(corpus);
  return corpus;
}

void WriteCorpus(const Corpus& corpus, const std::filesystem::path& manifest_path,
                 const std::filesystem::path& frames_path) {
  Validate(corpus);
  std::ofstream frames(frames_path, std::ios::binary | std::ios::trunc);
  if (!frames) throw Error(ErrorKind::kIo, "cannot write frames file " + frames_path.string());
  std::ofstream manifest(manifest_path, std::ios::trunc);
  if (!manifest) throw Error(ErrorKind::kIo, "cannot write manifest " + manifest_path.string());

  frames.write(kFramesMagic, 4);
  PutU32(frames, kFramesVersion);
  PutU32(frames, static_cast<std::uint32_t>(corpus.dim));
  std::uint64_t offset = 12;
  std::vector<float> buffer;
  for (const auto& u : corpus.utterances) {
    OrderedJson record;
    record["id"] = u.id;
    record["dialect"] = corpus.taxonomy.dialects()[u.dialect];
    record["offset"] = offset;
    record["num_frames"] = u.num_frames();
    record["duration_s"] = u.duration_s;
    record["split"] = SplitName(u.split);
    manifest << record.dump() << '\n';

    PutU32(frames, static_cast<std::uint32_t>(u.num_frames()));
    buffer.resize(u.frames.size());
    Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        buffer.data(), u.frames.rows(), u.frames.cols()) = u.frames.cast<float>();
    frames.write(reinterpret_cast<const char*>(buffer.data()),
                 static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    offset += 4 + buffer.size() * sizeof(float);
  }
  if (!frames || !manifest) throw Error(ErrorKind::kIo, "failed while writing corpus");
}

Corpus SubsampleBudget(const Corpus& corpus, double hours_per_dialect, std::uint64_t seed) {
  const std::size_t num_dialects = corpus.taxonomy.num_dialects();
  std::vector<std::vector<std::size_t>> by_dialect(num_dialects);
  for (std::size_t k = 0; k < corpus.utterances.size(); ++k) {
    const auto& u = corpus.utterances[k];
    if (u.split == Split::kTrain) by_dialect[u.dialect].push_back(k);
  }
  const double budget_s = hours_per_dialect * 3600.0;
  Rng rng(seed);
  std::vector<bool> keep(corpus.utterances.size(), false);
  for (std::size_t d = 0; d < num_dialects; ++d) {
    auto& pool = by_dialect[d];
    if (pool.empty()) {
      throw Error(ErrorKind::kCoverage, "dialect '" + corpus.taxonomy.dialects()[d] +
                                            "' has no train utterances");
    }
    std::shuffle(pool.begin(), pool.end(), rng.engine());
    double total = 0.0;
    for (std::size_t k : pool) {
      if (total >= budget_s) break;
      keep[k] = true;
      total += corpus.utterances[k].duration_s;
    }
  }
  Corpus out;
  out.taxonomy = corpus.taxonomy;
  out.dim = corpus.dim;
  out.frame_rate_hz = corpus.frame_rate_hz;
  for (std::size_t k = 0; k < corpus.utterances.size(); ++k) {
    const auto& u = corpus.utterances[k];
    if (u.split == Split::kEval || keep[k]) out.utterances.push_back(u);
  }
  return out;
}

void QuantizeFrames(Corpus& corpus) {
  for (auto& u : corpus.utterances) {
    u.frames = u.frames.cast<float>().cast<double>();
  }
}

}  // namespace mapmix::corpus
