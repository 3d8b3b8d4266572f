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

#include "headct_one/graph.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "headct_one/error.hpp"
#include "headct_one/text.hpp"
#include "json.hpp"

namespace headct {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kEntityLabelNames[] = {
    "anatomy",       "observation_present", "observation_absent",
    "device_present", "device_absent",       "procedure",
    "descriptor"};
constexpr std::string_view kRelationLabelNames[] = {
    "suggestive_of", "associated_with", "located_at", "modify"};
constexpr std::string_view kOntologyNames[] = {"finding", "descriptor",
                                               "anatomy"};

[[noreturn]] void schema_error(const std::string& message,
                               const std::string& path) {
  throw Error(ErrorCode::kSchema, message, path);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& path, LoadMode mode,
                std::vector<std::string>& warnings) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (known) continue;
    if (mode == LoadMode::kStrict) {
      schema_error("unknown key \"" + key + "\"", path);
    }
    warnings.push_back(path + ": ignoring unknown key \"" + key + "\"");
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing key \"") + key + "\"", path);
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) {
    schema_error(std::string("\"") + key + "\" must be a string",
                 path + "." + key);
  }
  return v.get<std::string>();
}

ConceptRef parse_concept(const json& j, const std::string& path, LoadMode mode,
                         std::vector<std::string>& warnings) {
  if (!j.is_object()) schema_error("concept must be an object", path);
  check_keys(j, {"ontology", "concept_id", "similarity"}, path, mode, warnings);
  ConceptRef ref;
  std::string onto = require_string(j, "ontology", path);
  auto kind = parse_ontology_kind(onto);
  if (!kind) schema_error("unknown ontology \"" + onto + "\"", path + ".ontology");
  ref.ontology = *kind;
  ref.concept_id = require_string(j, "concept_id", path);
  if (ref.concept_id.empty()) schema_error("empty concept_id", path + ".concept_id");
  const json& sim = require(j, "similarity", path);
  if (!sim.is_number()) schema_error("similarity must be a number", path + ".similarity");
  ref.similarity = sim.get<double>();
  if (!(ref.similarity >= 0.0 && ref.similarity <= 1.0)) {
    schema_error("similarity outside [0,1]", path + ".similarity");
  }
  return ref;
}

Entity parse_entity(const json& j, const std::string& path, LoadMode mode,
                    std::vector<std::string>& warnings) {
  if (!j.is_object()) schema_error("entity must be an object", path);
  check_keys(j, {"id", "text", "label", "span", "concepts"}, path, mode,
             warnings);
  Entity e;
  e.id = require_string(j, "id", path);
  e.text = require_string(j, "text", path);
  std::string label = require_string(j, "label", path);
  auto parsed = parse_entity_label(label);
  if (!parsed) schema_error("unknown entity label \"" + label + "\"", path + ".label");
  e.label = *parsed;
  if (auto it = j.find("span"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
        !(*it)[1].is_number_integer()) {
      schema_error("span must be [start, end]", path + ".span");
    }
    e.span = Span{(*it)[0].get<int>(), (*it)[1].get<int>()};
  }
  if (auto it = j.find("concepts"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) schema_error("concepts must be an array", path + ".concepts");
    for (std::size_t i = 0; i < it->size(); ++i) {
      e.concepts.push_back(parse_concept(
          (*it)[i], path + ".concepts[" + std::to_string(i) + "]", mode, warnings));
    }
  }
  return e;
}

Relation parse_relation(const json& j, const std::string& path, LoadMode mode,
                        std::vector<std::string>& warnings) {
  if (!j.is_object()) schema_error("relation must be an object", path);
  check_keys(j, {"source", "label", "target"}, path, mode, warnings);
  Relation r;
  r.source = require_string(j, "source", path);
  r.target = require_string(j, "target", path);
  std::string label = require_string(j, "label", path);
  auto parsed = parse_relation_label(label);
  if (!parsed) schema_error("unknown relation label \"" + label + "\"", path + ".label");
  r.label = *parsed;
  return r;
}

}  // namespace

std::string_view to_string(EntityLabel label) {
  return kEntityLabelNames[static_cast<int>(label)];
}

std::string_view to_string(RelationLabel label) {
  return kRelationLabelNames[static_cast<int>(label)];
}

std::string_view to_string(OntologyKind kind) {
  return kOntologyNames[static_cast<int>(kind)];
}

std::optional<EntityLabel> parse_entity_label(std::string_view s) {
  for (int i = 0; i < 7; ++i) {
    if (kEntityLabelNames[i] == s) return static_cast<EntityLabel>(i);
  }
  return std::nullopt;
}

std::optional<RelationLabel> parse_relation_label(std::string_view s) {
  for (int i = 0; i < 4; ++i) {
    if (kRelationLabelNames[i] == s) return static_cast<RelationLabel>(i);
  }
  return std::nullopt;
}

std::optional<OntologyKind> parse_ontology_kind(std::string_view s) {
  for (int i = 0; i < 3; ++i) {
    if (kOntologyNames[i] == s) return static_cast<OntologyKind>(i);
  }
  return std::nullopt;
}

bool is_observation_or_device(EntityLabel label) {
  switch (label) {
    case EntityLabel::kObservationPresent:
    case EntityLabel::kObservationAbsent:
    case EntityLabel::kDevicePresent:
    case EntityLabel::kDeviceAbsent:
      return true;
    default:
      return false;
  }
}

OntologyKind target_ontology(EntityLabel label) {
  switch (label) {
    case EntityLabel::kAnatomy: return OntologyKind::kAnatomy;
    case EntityLabel::kDescriptor: return OntologyKind::kDescriptor;
    default: return OntologyKind::kFinding;
  }
}

const Entity* ReportGraph::find_entity(std::string_view id) const {
  for (const Entity& e : entities) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

bool relation_allowed(RelationLabel label, EntityLabel source,
                      EntityLabel target) {
  switch (label) {
    case RelationLabel::kModify:
      return source == EntityLabel::kDescriptor;
    case RelationLabel::kLocatedAt:
      return is_observation_or_device(source) && target == EntityLabel::kAnatomy;
    case RelationLabel::kSuggestiveOf:
    case RelationLabel::kAssociatedWith:
      return is_observation_or_device(source) && is_observation_or_device(target);
  }
  return false;
}

std::vector<std::string> validate_graph(const ReportGraph& graph,
                                        LoadMode mode) {
  std::vector<std::string> warnings;
  std::map<std::string, const Entity*> by_id;
  for (std::size_t i = 0; i < graph.entities.size(); ++i) {
    const Entity& e = graph.entities[i];
    const std::string path = "entities[" + std::to_string(i) + "]";
    if (e.id.empty()) schema_error("empty entity id", path + ".id");
    if (!by_id.emplace(e.id, &e).second) {
      schema_error("duplicate entity id \"" + e.id + "\"", path + ".id");
    }
    if (text::trim(e.text).empty()) schema_error("empty entity text", path + ".text");
    if (e.span && e.span->start >= e.span->end) {
      schema_error("span start must be < end", path + ".span");
    }
    if (e.span && e.span->start < 0) schema_error("negative span", path + ".span");
    for (std::size_t c = 0; c < e.concepts.size(); ++c) {
      const ConceptRef& ref = e.concepts[c];
      const std::string cpath = path + ".concepts[" + std::to_string(c) + "]";
      if (ref.concept_id.empty()) schema_error("empty concept_id", cpath);
      if (!(ref.similarity >= 0.0 && ref.similarity <= 1.0)) {
        schema_error("similarity outside [0,1]", cpath);
      }
    }
  }
  for (std::size_t i = 0; i < graph.relations.size(); ++i) {
    const Relation& r = graph.relations[i];
    const std::string path = "relations[" + std::to_string(i) + "]";
    auto src = by_id.find(r.source);
    if (src == by_id.end()) {
      schema_error("relation source \"" + r.source + "\" does not resolve",
                   path + ".source");
    }
    auto tgt = by_id.find(r.target);
    if (tgt == by_id.end()) {
      schema_error("relation target \"" + r.target + "\" does not resolve",
                   path + ".target");
    }
    if (r.source == r.target) {
      schema_error("relation source equals target \"" + r.source + "\"", path);
    }
    if (!relation_allowed(r.label, src->second->label, tgt->second->label)) {
      std::string msg = std::string(to_string(src->second->label)) + " \"" +
                        r.source + "\" " + std::string(to_string(r.label)) +
                        " " + std::string(to_string(tgt->second->label)) +
                        " \"" + r.target + "\" is not a permitted combination";
      if (mode == LoadMode::kStrict) schema_error(msg, path);
      warnings.push_back(path + ": " + msg);
    }
  }
  return warnings;
}

LoadedGraph load_graph(std::string_view document, LoadMode mode) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, e.what());
  }
  if (!root.is_object()) schema_error("document must be an object", "$");
  LoadedGraph out;
  auto& warnings = out.warnings;
  check_keys(root, {"report_id", "meta", "entities", "relations"}, "$", mode,
             warnings);
  ReportGraph& g = out.graph;
  g.report_id = require_string(root, "report_id", "$");
  if (auto it = root.find("meta"); it != root.end() && !it->is_null()) {
    if (!it->is_object()) schema_error("meta must be an object", "meta");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string()) schema_error("meta values must be strings", "meta." + k);
      g.meta.emplace(k, v.get<std::string>());
    }
  }
  const json& entities = require(root, "entities", "$");
  if (!entities.is_array()) schema_error("entities must be an array", "entities");
  for (std::size_t i = 0; i < entities.size(); ++i) {
    g.entities.push_back(parse_entity(
        entities[i], "entities[" + std::to_string(i) + "]", mode, warnings));
  }
  const json& relations = require(root, "relations", "$");
  if (!relations.is_array()) schema_error("relations must be an array", "relations");
  for (std::size_t i = 0; i < relations.size(); ++i) {
    g.relations.push_back(parse_relation(
        relations[i], "relations[" + std::to_string(i) + "]", mode, warnings));
  }
  auto more = validate_graph(g, mode);
  warnings.insert(warnings.end(), more.begin(), more.end());
  return out;
}

std::string save_graph(const ReportGraph& graph) {
  ordered_json root = ordered_json::object();
  root["report_id"] = graph.report_id;
  root["meta"] = ordered_json::object();
  for (const auto& [k, v] : graph.meta) root["meta"][k] = v;
  ordered_json entities = ordered_json::array();
  for (const Entity& e : graph.entities) {
    ordered_json je = ordered_json::object();
    je["id"] = e.id;
    je["text"] = e.text;
    je["label"] = std::string(to_string(e.label));
    if (e.span) je["span"] = ordered_json::array({e.span->start, e.span->end});
    if (!e.concepts.empty()) {
      ordered_json concepts = ordered_json::array();
      for (const ConceptRef& c : e.concepts) {
        ordered_json jc = ordered_json::object();
        jc["ontology"] = std::string(to_string(c.ontology));
        jc["concept_id"] = c.concept_id;
        jc["similarity"] = c.similarity;
        concepts.push_back(std::move(jc));
      }
      je["concepts"] = std::move(concepts);
    }
    entities.push_back(std::move(je));
  }
  root["entities"] = std::move(entities);
  ordered_json relations = ordered_json::array();
  for (const Relation& r : graph.relations) {
    ordered_json jr = ordered_json::object();
    jr["source"] = r.source;
    jr["label"] = std::string(to_string(r.label));
    jr["target"] = r.target;
    relations.push_back(std::move(jr));
  }
  root["relations"] = std::move(relations);
  return root.dump(2) + "\n";
}

LoadedGraph load_graph_file(const std::string& path, LoadMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read " + path, path);
  try {
    return load_graph(buf.str(), mode);
  } catch (const Error& e) {
    std::string where = e.path().empty() ? path : path + ":" + e.path();
    throw Error(e.code(), e.message(), where);
  }
}

}  // namespace headct
