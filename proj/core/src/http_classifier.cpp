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

#include <string>

#include "headct_one/error.hpp"
#include "headct_one/normalizer.hpp"
#include "httplib.h"
#include "json.hpp"

namespace headct {

HttpDescriptorClassifier::HttpDescriptorClassifier(std::string endpoint,
                                                   double timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  // http://host[:port][/path]
  const std::string marker = "://";
  auto scheme_end = endpoint.find(marker);
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "classifier endpoint needs a scheme",
                endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + marker.size());
  if (path_start == std::string::npos) {
    scheme_host_port_ = endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

std::optional<std::string> HttpDescriptorClassifier::classify(
    std::string_view text) {
  // A client per call: httplib clients are not safe for concurrent use.
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(timeout_seconds_);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(micros);
  client.set_read_timeout(micros);
  client.set_write_timeout(micros);

  nlohmann::json body;
  body["text"] = std::string(text);
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kClassifierUnavailable,
                "request failed: " + httplib::to_string(res.error()),
                scheme_host_port_ + path_);
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kClassifierUnavailable,
                "HTTP status " + std::to_string(res->status),
                scheme_host_port_ + path_);
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw Error(ErrorCode::kClassifierUnavailable, "response is not JSON",
                scheme_host_port_ + path_);
  }
  if (!reply.is_object() || !reply.contains("category_path") ||
      reply["category_path"].is_null()) {
    return std::nullopt;
  }
  if (!reply["category_path"].is_string()) {
    throw Error(ErrorCode::kClassifierUnavailable,
                "category_path must be a string", scheme_host_port_ + path_);
  }
  return reply["category_path"].get<std::string>();
}

}  // namespace headct
