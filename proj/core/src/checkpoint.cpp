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

#include "mapmix/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

#include "json.hpp"

#include "mapmix/augment.hpp"
#include "mapmix/error.hpp"

namespace mapmix {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

std::string EncodeDoubles(const double* data, std::size_t count) {
  return EncodeBase64(std::string(reinterpret_cast<const char*>(data), count * sizeof(double)));
}

std::vector<double> DecodeDoubles(const std::string& text, std::size_t expected,
                                  const char* field) {
  const std::string bytes = DecodeBase64(text);
  if (bytes.size() != expected * sizeof(double)) {
    throw Error(ErrorKind::kSchema, std::string("checkpoint field '") + field +
                                        "' has the wrong length");
  }
  std::vector<double> values(expected);
  std::memcpy(values.data(), bytes.data(), bytes.size());
  return values;
}

nlohmann::ordered_json ConfigToJson(const model::TrainConfig& c) {
  nlohmann::ordered_json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["alpha"] = c.alpha;
  j["batch_size"] = c.batch_size;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["strategy"] = std::string(augment::ToString(c.strategy));
  j["label_mode"] = model::ToString(model::EffectiveLabelMode(c));
  j["smoothing_s"] = c.smoothing_s;
  j["seed"] = c.seed;
  return j;
}

model::TrainConfig ConfigFromJson(const nlohmann::json& j) {
  model::TrainConfig c;
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_eps = j.at("adam_eps").get<double>();
  c.strategy = augment::ParseStrategy(j.at("strategy").get<std::string>());
  c.label_mode = model::ParseLabelMode(j.at("label_mode").get<std::string>());
  c.smoothing_s = j.at("smoothing_s").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

std::string EncodeBase64(const std::string& bytes) {
  using namespace boost::archive::iterators;
  using Encoder = base64_from_binary<transform_width<std::string::const_iterator, 6, 8>>;
  std::string text(Encoder(bytes.begin()), Encoder(bytes.end()));
  text.append((3 - bytes.size() % 3) % 3, '=');
  return text;
}

std::string DecodeBase64(const std::string& text) {
  using namespace boost::archive::iterators;
  using Decoder = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
  if (text.size() % 4 != 0) throw Error(ErrorKind::kFormat, "base64 length is not a multiple of 4");
  std::size_t padding = 0;
  while (padding < 2 && padding < text.size() && text[text.size() - 1 - padding] == '=') {
    ++padding;
  }
  const std::string body = text.substr(0, text.size() - padding);
  for (char ch : body) {
    const bool valid = (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') ||
                       (ch >= '0' && ch <= '9') || ch == '+' || ch == '/';
    if (!valid) throw Error(ErrorKind::kFormat, "invalid base64 character");
  }
  const std::size_t decoded_size = text.size() / 4 * 3 - padding;
  std::string bytes(Decoder(body.begin()), Decoder(body.end()));
  bytes.resize(decoded_size);
  return bytes;
}

void WriteCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const auto& p = checkpoint.params;
  nlohmann::ordered_json doc;
  doc["format"] = "mapmix-checkpoint";
  doc["version"] = 1;
  doc["dim"] = p.dim();
  doc["num_classes"] = p.num_classes();
  doc["dialects"] = checkpoint.dialects;
  doc["attention"] = EncodeDoubles(p.attention.data(), p.dim());
  doc["weights"] = EncodeDoubles(p.weights.data(), p.num_classes() * p.dim());
  doc["bias"] = EncodeDoubles(p.bias.data(), p.num_classes());
  doc["config"] = ConfigToJson(checkpoint.config);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write checkpoint " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "failed while writing checkpoint " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  Checkpoint checkpoint;
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.at("format").get<std::string>() != "mapmix-checkpoint" ||
        doc.at("version").get<int>() != 1) {
      throw Error(ErrorKind::kFormat, "not a version 1 checkpoint");
    }
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto num_classes = doc.at("num_classes").get<std::size_t>();
    checkpoint.dialects = doc.at("dialects").get<std::vector<std::string>>();
    if (checkpoint.dialects.size() != num_classes) {
      throw Error(ErrorKind::kSchema, "checkpoint dialect list does not match num_classes");
    }
    checkpoint.params = model::ZeroParams(dim, num_classes);
    auto& p = checkpoint.params;
    const auto attention = DecodeDoubles(doc.at("attention").get<std::string>(), dim, "attention");
    const auto weights =
        DecodeDoubles(doc.at("weights").get<std::string>(), num_classes * dim, "weights");
    const auto bias = DecodeDoubles(doc.at("bias").get<std::string>(), num_classes, "bias");
    std::copy(attention.begin(), attention.end(), p.attention.data());
    std::copy(weights.begin(), weights.end(), p.weights.data());
    std::copy(bias.begin(), bias.end(), p.bias.data());
    checkpoint.config = ConfigFromJson(doc.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, "checkpoint " + path.string() + ": " + e.what());
  }
  if (!checkpoint.params.AllFinite()) {
    throw Error(ErrorKind::kNumeric, "checkpoint contains non-finite parameters");
  }
  return checkpoint;
}

}  // namespace mapmix
