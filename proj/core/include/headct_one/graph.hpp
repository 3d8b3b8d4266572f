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

#ifndef HEADCT_ONE_GRAPH_HPP_
#define HEADCT_ONE_GRAPH_HPP_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace headct {

enum class EntityLabel {
  kAnatomy,
  kObservationPresent,
  kObservationAbsent,
  kDevicePresent,
  kDeviceAbsent,
  kProcedure,
  kDescriptor,
};

inline constexpr EntityLabel kAllEntityLabels[] = {
    EntityLabel::kAnatomy,       EntityLabel::kObservationPresent,
    EntityLabel::kObservationAbsent, EntityLabel::kDevicePresent,
    EntityLabel::kDeviceAbsent,  EntityLabel::kProcedure,
    EntityLabel::kDescriptor,
};

enum class RelationLabel {
  kSuggestiveOf,
  kAssociatedWith,
  kLocatedAt,
  kModify,
};

inline constexpr RelationLabel kAllRelationLabels[] = {
    RelationLabel::kSuggestiveOf, RelationLabel::kAssociatedWith,
    RelationLabel::kLocatedAt, RelationLabel::kModify};

enum class OntologyKind { kFinding, kDescriptor, kAnatomy };

std::string_view to_string(EntityLabel label);
std::string_view to_string(RelationLabel label);
std::string_view to_string(OntologyKind kind);
std::optional<EntityLabel> parse_entity_label(std::string_view s);
std::optional<RelationLabel> parse_relation_label(std::string_view s);
std::optional<OntologyKind> parse_ontology_kind(std::string_view s);

// observation_* and device_*
bool is_observation_or_device(EntityLabel label);

// Ontology an entity of this label is normalized against.
OntologyKind target_ontology(EntityLabel label);

struct ConceptRef {
  OntologyKind ontology = OntologyKind::kFinding;
  std::string concept_id;
  double similarity = 1.0;

  friend bool operator==(const ConceptRef&, const ConceptRef&) = default;
};

// Half-open token range.
struct Span {
  int start = 0;
  int end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

struct Entity {
  std::string id;
  std::string text;
  EntityLabel label = EntityLabel::kObservationPresent;
  std::optional<Span> span;
  std::vector<ConceptRef> concepts;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Relation {
  std::string source;
  RelationLabel label = RelationLabel::kModify;
  std::string target;

  friend bool operator==(const Relation&, const Relation&) = default;
};

struct ReportGraph {
  std::string report_id;
  std::map<std::string, std::string> meta;
  std::vector<Entity> entities;
  std::vector<Relation> relations;

  const Entity* find_entity(std::string_view id) const;

  friend bool operator==(const ReportGraph&, const ReportGraph&) = default;
};

enum class LoadMode { kStrict, kLenient };

struct LoadedGraph {
  ReportGraph graph;
  std::vector<std::string> warnings;
};

// Whether `label` is a permitted relation between entities with the given
// labels (descriptor modifies anything; observation/device located_at
// anatomy; suggestive_of / associated_with between observations/devices).
bool relation_allowed(RelationLabel label, EntityLabel source,
                      EntityLabel target);

// Structural checks (ids, text, spans, endpoints) throw SchemaError.
// Label-combination violations throw in strict mode and are returned as
// warnings in lenient mode.
std::vector<std::string> validate_graph(const ReportGraph& graph,
                                        LoadMode mode);

// Parses and validates the JSON interchange format. Throws Error with
// kSyntax for malformed JSON and kSchema (with a path) for content errors.
LoadedGraph load_graph(std::string_view document,
                       LoadMode mode = LoadMode::kStrict);

// Deterministic serialization; keys in interchange order, two-space indent,
// trailing newline.
std::string save_graph(const ReportGraph& graph);

LoadedGraph load_graph_file(const std::string& path,
                            LoadMode mode = LoadMode::kStrict);

}  // namespace headct

#endif  // HEADCT_ONE_GRAPH_HPP_
