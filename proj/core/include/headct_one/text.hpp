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

#ifndef HEADCT_ONE_TEXT_HPP_
#define HEADCT_ONE_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace headct::text {

// ASCII lowercase; bytes >= 0x80 pass through unchanged.
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

// Lowercase, trim, and collapse internal whitespace runs to one space.
// This is the canonical form used for every synonym comparison.
std::string normalize_surface(std::string_view s);

// normalize_surface() followed by removal of trailing punctuation.
std::string preprocess_mention(std::string_view s);

// Human-readable form of a concept id: '_' and '/' become spaces.
std::string humanize_id(std::string_view concept_id);

std::vector<std::string> split_words(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

struct Token {
  std::string text;  // lowercase
  std::size_t begin = 0;  // byte offsets into the source string
  std::size_t end = 0;
};

// Whitespace + punctuation tokenizer. Runs of alphanumerics (plus '.' between
// digits, so "3.6" stays whole) form word tokens; every other non-space
// character is a token of its own.
std::vector<Token> tokenize(std::string_view s);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace headct::text

#endif  // HEADCT_ONE_TEXT_HPP_
