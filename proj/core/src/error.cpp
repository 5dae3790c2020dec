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

#include "mapmix/error.hpp"

namespace mapmix {

std::string_view ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "configuration";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kCorruption: return "corruption";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kIo: return "I/O";
    case ErrorKind::kCoverage: return "coverage";
    case ErrorKind::kRange: return "range";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kDegenerate: return "degenerate-corpus";
    case ErrorKind::kStrategy: return "strategy";
    case ErrorKind::kLogIntegrity: return "log-integrity";
    case ErrorKind::kPartition: return "partition";
    case ErrorKind::kEvaluation: return "evaluation";
  }
  return "unknown";
}

int ExitCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kRange:
    case ErrorKind::kStrategy:
      return 2;
    case ErrorKind::kNumeric:
      return 4;
    default:
      return 3;
  }
}

}  // namespace mapmix
