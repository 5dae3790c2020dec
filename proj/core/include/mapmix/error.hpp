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

#ifndef MAPMIX_ERROR_HPP_
#define MAPMIX_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mapmix {

enum class ErrorKind {
  kConfig,        // invalid configuration or missing prerequisite
  kFormat,        // malformed file header or syntax
  kCorruption,    // offsets or payload inconsistent with the file
  kSchema,        // values inconsistent with the taxonomy or model shape
  kIo,            // unreadable or unwritable path
  kCoverage,      // a dialect has no training data
  kRange,         // index or parameter out of its domain
  kNumeric,       // non-finite values
  kDegenerate,    // a filtered training set ended up empty
  kStrategy,      // a sampling strategy lacks the region it draws from
  kLogIntegrity,  // ragged training-dynamics log
  kPartition,     // too few datamap entries
  kEvaluation,    // nothing could be evaluated
};

std::string_view ToString(ErrorKind kind);

// Process exit code for the command-line tool: 2 configuration, 3 data,
// 4 numeric.
int ExitCode(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ToString(kind)) + " error: " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mapmix

#endif  // MAPMIX_ERROR_HPP_
