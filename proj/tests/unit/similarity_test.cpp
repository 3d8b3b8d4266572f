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

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace headct {
namespace {

// Reference values from tests/oracles/trigram_dice.py.
struct DicePair {
  const char* a;
  const char* b;
  double expected;
};

constexpr DicePair kOracleValues[] = {
    {"hemorrhage", "haemorrhage", 0.8},
    {"thrombossis", "thrombosis", 0.88},
    {"subdural hematoma", "hematoma", 0.5517241379310345},
    {"ventricle", "ventricles", 0.782608695652174},
    {"left thalamus", "thalamus", 0.64},
    {"hémorragie", "hemorrhage", 0.32},
};

TEST(DefaultSimilarity, Identity) {
  EXPECT_EQ(default_similarity("hemorrhage", "hemorrhage"), 1.0);
}

TEST(DefaultSimilarity, DisjointTrigramsScoreZero) {
  EXPECT_EQ(default_similarity("abc", "xyz"), 0.0);
}

TEST(DefaultSimilarity, EmptyConvention) {
  EXPECT_EQ(default_similarity("", ""), 1.0);
  EXPECT_EQ(default_similarity("", "a"), 0.0);
}

TEST(DefaultSimilarity, MatchesOracleTo12Places) {
  for (const auto& p : kOracleValues) {
    EXPECT_NEAR(default_similarity(p.a, p.b), p.expected, 1e-12) << p.a << " / " << p.b;
  }
}

TEST(DefaultSimilarity, CaseInsensitive) {
  EXPECT_EQ(default_similarity("Hemorrhage", "hemorrhage"), 1.0);
}

TEST(DefaultSimilarity, ContractOnRandomStrings) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcde fgh";
  auto word = [&] {
    std::string s;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      s.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
    }
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    const std::string a = word(), b = word();
    const double ab = default_similarity(a, b);
    EXPECT_EQ(ab, default_similarity(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_EQ(default_similarity(a, a), 1.0);
  }
}

TEST(TrigramDiceSimilarity, WrapsDefault) {
  TrigramDiceSimilarity provider;
  EXPECT_EQ(provider.name(), "trigram");
  EXPECT_EQ(provider.similarity("hemorrhage", "haemorrhage"),
            default_similarity("hemorrhage", "haemorrhage"));
}

}  // namespace
}  // namespace headct
