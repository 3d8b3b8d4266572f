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

#include "headct_one/gazetteer.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "headct_one/text.hpp"

namespace headct {

namespace {

constexpr std::string_view kNegationCueConcept = "certainty/definitely_absent";

std::string token_key(const std::vector<text::Token>& tokens, std::size_t begin,
                      std::size_t end) {
  std::string key;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) key.push_back('\x1f');
    key += tokens[i].text;
  }
  return key;
}

struct Entry {
  OntologyKind kind;
  std::string concept_id;
};

struct Dictionary {
  std::unordered_map<std::string, Entry> entries;
  std::size_t max_tokens = 0;

  void add(const ConceptTable& table) {
    for (const auto& [form, id] : table.surface_forms()) {
      auto tokens = text::tokenize(form);
      if (tokens.empty()) continue;
      // First table added wins a shared surface form.
      entries.try_emplace(token_key(tokens, 0, tokens.size()),
                          Entry{table.kind(), id});
      max_tokens = std::max(max_tokens, tokens.size());
    }
  }
};

struct Hit {
  std::size_t begin;
  std::size_t end;
  Entry entry;
};

}  // namespace

ReportGraph gazetteer_extract(std::string_view text,
                              const OntologySet& ontologies,
                              std::string report_id) {
  ReportGraph graph;
  graph.report_id = std::move(report_id);
  const auto tokens = text::tokenize(text);
  if (tokens.empty()) return graph;

  Dictionary dict;
  dict.add(ontologies.finding);
  dict.add(ontologies.anatomy);
  dict.add(ontologies.descriptor);

  std::vector<Hit> hits;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t longest = std::min(dict.max_tokens, tokens.size() - i);
    bool found = false;
    for (std::size_t len = longest; len >= 1; --len) {
      auto it = dict.entries.find(token_key(tokens, i, i + len));
      if (it == dict.entries.end()) continue;
      hits.push_back({i, i + len, it->second});
      i += len;
      found = true;
      break;
    }
    if (!found) ++i;
  }

  // Index of the last token of the most recent negation cue.
  std::optional<std::size_t> last_cue;
  for (const Hit& h : hits) {
    if (h.entry.kind == OntologyKind::kDescriptor &&
        h.entry.concept_id == kNegationCueConcept) {
      last_cue = h.end - 1;
      continue;
    }
    Entity e;
    e.id = "e" + std::to_string(graph.entities.size() + 1);
    e.text = std::string(text.substr(tokens[h.begin].begin,
                                     tokens[h.end - 1].end - tokens[h.begin].begin));
    e.span = Span{static_cast<int>(h.begin), static_cast<int>(h.end)};
    switch (h.entry.kind) {
      case OntologyKind::kFinding:
        e.label = last_cue && h.begin - *last_cue <= kNegationWindow
                      ? EntityLabel::kObservationAbsent
                      : EntityLabel::kObservationPresent;
        break;
      case OntologyKind::kAnatomy:
        e.label = EntityLabel::kAnatomy;
        break;
      case OntologyKind::kDescriptor:
        e.label = EntityLabel::kDescriptor;
        break;
    }
    graph.entities.push_back(std::move(e));
  }
  return graph;
}

}  // namespace headct
