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

#include "headct_one/error.hpp"

namespace headct {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kCorruptData: return "CorruptDataError";
    case ErrorCode::kRootNotFound: return "RootNotFound";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kCorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::kInsufficientCorpus: return "InsufficientCorpus";
    case ErrorCode::kClassifierUnavailable: return "ClassifierUnavailable";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

bool is_config_error(ErrorCode code) { return code == ErrorCode::kConfig; }

namespace {

std::string compose(ErrorCode code, const std::string& message,
                    const std::string& path) {
  std::string out(error_code_name(code));
  out += ": ";
  out += message;
  if (!path.empty()) {
    out += " (at ";
    out += path;
    out += ")";
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string path)
    : std::runtime_error(compose(code, message, path)),
      code_(code),
      message_(message),
      path_(std::move(path)) {}

}  // namespace headct
