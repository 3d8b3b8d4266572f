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

#ifndef HEADCT_ONE_ONTOLOGY_HPP_
#define HEADCT_ONE_ONTOLOGY_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "headct_one/graph.hpp"

namespace headct {

struct Concept {
  std::string concept_id;
  std::optional<std::string> parent;
  // Explicit surface forms. The humanized concept id is an implicit synonym
  // and need not be listed.
  std::vector<std::string> synonyms;
  // Ancestor ids, root first; excludes the concept itself.
  std::vector<std::string> level_path;

  friend bool operator==(const Concept&, const Concept&) = default;
};

// An immutable concept table with a synonym index. Construction never
// throws on content problems; call validate_ontology() to find them.
// When two concepts claim the same surface form the first one wins the
// index slot.
class ConceptTable {
 public:
  ConceptTable() = default;
  ConceptTable(OntologyKind kind, std::vector<Concept> concepts);

  OntologyKind kind() const { return kind_; }
  const std::vector<Concept>& concepts() const { return concepts_; }
  std::size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }

  const Concept* find(std::string_view concept_id) const;
  bool contains(std::string_view concept_id) const {
    return find(concept_id) != nullptr;
  }

  // Case-insensitive, whitespace-normalized exact match.
  std::optional<std::string> lookup(std::string_view surface) const;

  // Every (normalized surface form, concept id) pair in concept order,
  // implicit id form first for each concept.
  const std::vector<std::pair<std::string, std::string>>& surface_forms()
      const {
    return surface_forms_;
  }

 private:
  OntologyKind kind_ = OntologyKind::kFinding;
  std::vector<Concept> concepts_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::string> by_surface_;
  std::vector<std::pair<std::string, std::string>> surface_forms_;
};

std::optional<std::string> lookup_synonym(const ConceptTable& table,
                                          std::string_view surface);

struct OntologySet {
  ConceptTable finding;
  ConceptTable descriptor;
  ConceptTable anatomy;
  std::string provenance;

  const ConceptTable& table(OntologyKind kind) const;
};

enum class DiagnosticKind {
  kDuplicateId,
  kOrphanParent,
  kCycle,
  kInconsistentLevelPath,
  kDuplicateSynonym,
  kEmptySynonym,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::vector<std::string> concepts;  // every concept involved, sorted
  std::string message;
};

std::vector<Diagnostic> validate_ontology(const ConceptTable& table);

// Fills level_path from parent links. Concepts on a cycle or below a
// missing parent keep whatever partial path could be resolved.
std::vector<Concept> with_level_paths(std::vector<Concept> concepts);

// Built-in findings and descriptor tables plus the demo head-anatomy
// vocabulary. Throws kCorruptData if any table fails validation.
const OntologySet& builtin_ontologies();
OntologySet load_builtin_ontologies();

ConceptTable builtin_finding_table();
ConceptTable builtin_descriptor_table();
ConceptTable builtin_anatomy_table();

// Raw CSV text of the demo anatomy vocabulary.
std::string_view demo_anatomy_csv();
inline constexpr int kDefaultAnatomyDepth = 5;
std::vector<std::string> demo_anatomy_roots();

// Builds an anatomy table from an edge file (CSV with header
// child_id,child_name,parent_id). Takes the union of breadth-first
// subtrees below `roots` (matched by name, then by id, case-insensitively)
// down to `max_depth`; a node reachable along several paths keeps its
// shallowest depth and the parent on that path. Repeated rows for the same
// child_id with different names add synonyms.
// Throws kRootNotFound or kMalformedRow (with the line number).
ConceptTable ingest_anatomy(std::string_view csv,
                            const std::vector<std::string>& roots,
                            int max_depth);

// JSON import/export mirroring Concept fields.
std::string ontology_to_json(const ConceptTable& table,
                             std::string_view provenance = {});
ConceptTable ontology_from_json(std::string_view document);

}  // namespace headct

#endif  // HEADCT_ONE_ONTOLOGY_HPP_
