// Copyright 2026 The HeadCT-ONE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HEADCT_ONE_ERROR_HPP_
#define HEADCT_ONE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace headct {

// Error categories surfaced by the library. The names returned by
// error_code_name() are part of the external contract (CLI messages,
// document-level API).
enum class ErrorCode {
  kSyntax,
  kSchema,
  kCorruptData,
  kRootNotFound,
  kMalformedRow,
  kNotNormalized,
  kCorpusTooSmall,
  kInsufficientCorpus,
  kClassifierUnavailable,
  kConfig,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// Data errors map to exit code 1, configuration/usage errors to 2.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {});

  ErrorCode code() const { return code_; }
  // Location of the offending element, e.g. "entities[3].label" or a file
  // name with line number. May be empty.
  const std::string& path() const { return path_; }
  // The message without the code prefix and location suffix.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string path_;
};

}  // namespace headct

#endif  // HEADCT_ONE_ERROR_HPP_
