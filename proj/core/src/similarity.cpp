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

#include "headct_one/similarity.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "headct_one/text.hpp"

namespace headct {

namespace {

std::vector<std::string> trigrams(std::string_view s) {
  std::string padded = "\x02\x02" + text::to_lower(s) + "\x03\x03";
  std::vector<std::string> out;
  out.reserve(padded.size() - 2);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    out.push_back(padded.substr(i, 3));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double default_similarity(std::string_view a, std::string_view b) {
  const auto ta = trigrams(a);
  const auto tb = trigrams(b);
  // Sorted-merge multiset intersection.
  std::size_t common = 0;
  std::size_t i = 0, j = 0;
  while (i < ta.size() && j < tb.size()) {
    if (ta[i] == tb[j]) {
      ++common;
      ++i;
      ++j;
    } else if (ta[i] < tb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * static_cast<double>(common) /
         static_cast<double>(ta.size() + tb.size());
}

}  // namespace headct
