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

#ifndef HEADCT_ONE_SIMILARITY_HPP_
#define HEADCT_ONE_SIMILARITY_HPP_

#include <string>
#include <string_view>

namespace headct {

// Contract: deterministic, symmetric, values in [0,1], similarity(x,x)=1.
class SimilarityProvider {
 public:
  virtual ~SimilarityProvider() = default;
  virtual double similarity(std::string_view a, std::string_view b) const = 0;
  virtual std::string name() const = 0;
};

// Dice coefficient over character-trigram multisets of the ASCII-lowercased
// inputs. Each input is padded with two start markers (0x02) and two end
// markers (0x03) before trigrams are taken. Two empty strings score 1.
double default_similarity(std::string_view a, std::string_view b);

class TrigramDiceSimilarity final : public SimilarityProvider {
 public:
  double similarity(std::string_view a, std::string_view b) const override {
    return default_similarity(a, b);
  }
  std::string name() const override { return "trigram"; }
};

}  // namespace headct

#endif  // HEADCT_ONE_SIMILARITY_HPP_
