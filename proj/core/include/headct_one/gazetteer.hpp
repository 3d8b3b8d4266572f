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

#ifndef HEADCT_ONE_GAZETTEER_HPP_
#define HEADCT_ONE_GAZETTEER_HPP_

#include <string>
#include <string_view>

#include "headct_one/graph.hpp"
#include "headct_one/ontology.hpp"

namespace headct {

inline constexpr int kNegationWindow = 5;

// Longest-match dictionary tagger over the ontology synonyms. Produces
// entities only (no relations, no concepts). Finding hits are labeled
// observation_absent when a definitely_absent certainty cue ends within
// kNegationWindow tokens before them; those cues are consumed and not
// emitted as descriptor entities. On overlapping candidates the finding
// table wins over anatomy, anatomy over descriptor.
ReportGraph gazetteer_extract(std::string_view text,
                              const OntologySet& ontologies,
                              std::string report_id = {});

}  // namespace headct

#endif  // HEADCT_ONE_GAZETTEER_HPP_
