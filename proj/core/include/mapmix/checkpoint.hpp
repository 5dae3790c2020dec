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

#ifndef MAPMIX_CHECKPOINT_HPP_
#define MAPMIX_CHECKPOINT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "mapmix/model.hpp"
#include "mapmix/train.hpp"

namespace mapmix {

struct Checkpoint {
  model::ModelParams params;
  model::TrainConfig config;
  std::vector<std::string> dialects;
};

// JSON with base64 little-endian float64 arrays for the attention vector,
// the row-major classifier weights and the bias, plus the training config.
void WriteCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

std::string EncodeBase64(const std::string& bytes);
std::string DecodeBase64(const std::string& text);

}  // namespace mapmix

#endif  // MAPMIX_CHECKPOINT_HPP_
