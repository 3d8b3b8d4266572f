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

#include "headct_one/ontology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "headct_one/error.hpp"
#include "headct_one/text.hpp"
#include "json.hpp"

namespace headct {

ConceptTable::ConceptTable(OntologyKind kind, std::vector<Concept> concepts)
    : kind_(kind), concepts_(std::move(concepts)) {
  for (std::size_t i = 0; i < concepts_.size(); ++i) {
    by_id_.emplace(concepts_[i].concept_id, i);
  }
  for (const Concept& c : concepts_) {
    std::vector<std::string> forms;
    forms.push_back(text::humanize_id(c.concept_id));
    for (const std::string& s : c.synonyms) {
      forms.push_back(text::normalize_surface(s));
    }
    std::set<std::string> seen;
    for (std::string& form : forms) {
      if (form.empty() || !seen.insert(form).second) continue;
      by_surface_.emplace(form, c.concept_id);
      surface_forms_.emplace_back(std::move(form), c.concept_id);
    }
  }
}

const Concept* ConceptTable::find(std::string_view concept_id) const {
  auto it = by_id_.find(std::string(concept_id));
  return it == by_id_.end() ? nullptr : &concepts_[it->second];
}

std::optional<std::string> ConceptTable::lookup(std::string_view surface) const {
  auto it = by_surface_.find(text::normalize_surface(surface));
  if (it == by_surface_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> lookup_synonym(const ConceptTable& table,
                                          std::string_view surface) {
  return table.lookup(surface);
}

const ConceptTable& OntologySet::table(OntologyKind kind) const {
  switch (kind) {
    case OntologyKind::kFinding: return finding;
    case OntologyKind::kDescriptor: return descriptor;
    case OntologyKind::kAnatomy: return anatomy;
  }
  return finding;
}

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kDuplicateId: return "duplicate_id";
    case DiagnosticKind::kOrphanParent: return "orphan_parent";
    case DiagnosticKind::kCycle: return "cycle";
    case DiagnosticKind::kInconsistentLevelPath: return "inconsistent_level_path";
    case DiagnosticKind::kDuplicateSynonym: return "duplicate_synonym";
    case DiagnosticKind::kEmptySynonym: return "empty_synonym";
  }
  return "unknown";
}

std::vector<Diagnostic> validate_ontology(const ConceptTable& table) {
  std::vector<Diagnostic> out;
  const auto& concepts = table.concepts();
  std::map<std::string, const Concept*> by_id;
  for (const Concept& c : concepts) {
    if (!by_id.emplace(c.concept_id, &c).second) {
      out.push_back({DiagnosticKind::kDuplicateId, {c.concept_id},
                     "concept id \"" + c.concept_id + "\" defined twice"});
    }
  }

  std::set<std::string> on_cycle;
  for (const Concept& c : concepts) {
    if (c.parent && !by_id.count(*c.parent)) {
      out.push_back({DiagnosticKind::kOrphanParent, {c.concept_id},
                     "\"" + c.concept_id + "\" has missing parent \"" +
                         *c.parent + "\""});
      continue;
    }
    if (on_cycle.count(c.concept_id)) continue;
    // Walk up; a revisit means a cycle.
    std::vector<std::string> chain{c.concept_id};
    std::set<std::string> visited{c.concept_id};
    const Concept* cur = &c;
    while (cur->parent) {
      auto it = by_id.find(*cur->parent);
      if (it == by_id.end()) break;
      cur = it->second;
      if (!visited.insert(cur->concept_id).second) {
        auto start = std::find(chain.begin(), chain.end(), cur->concept_id);
        std::vector<std::string> members(start, chain.end());
        std::sort(members.begin(), members.end());
        bool fresh = true;
        for (const auto& m : members) fresh = fresh && !on_cycle.count(m);
        if (fresh) {
          on_cycle.insert(members.begin(), members.end());
          out.push_back({DiagnosticKind::kCycle, members,
                         "parent cycle through {" + text::join(members, ", ") +
                             "}"});
        }
        break;
      }
      chain.push_back(cur->concept_id);
    }
  }

  for (const Concept& c : concepts) {
    if (on_cycle.count(c.concept_id)) continue;
    std::vector<std::string> expected;
    const Concept* cur = &c;
    bool broken = false;
    while (cur->parent) {
      auto it = by_id.find(*cur->parent);
      if (it == by_id.end() || on_cycle.count(*cur->parent)) {
        broken = true;
        break;
      }
      expected.push_back(*cur->parent);
      cur = it->second;
    }
    if (broken) continue;
    std::reverse(expected.begin(), expected.end());
    if (expected != c.level_path) {
      out.push_back({DiagnosticKind::kInconsistentLevelPath, {c.concept_id},
                     "level_path of \"" + c.concept_id +
                         "\" disagrees with parent links"});
    }
  }

  std::map<std::string, std::string> owner;
  for (const Concept& c : concepts) {
    std::vector<std::string> forms{text::humanize_id(c.concept_id)};
    for (const std::string& s : c.synonyms) {
      std::string norm = text::normalize_surface(s);
      if (norm.empty()) {
        out.push_back({DiagnosticKind::kEmptySynonym, {c.concept_id},
                       "\"" + c.concept_id + "\" has an empty synonym"});
        continue;
      }
      forms.push_back(std::move(norm));
    }
    std::set<std::string> own(forms.begin(), forms.end());
    for (const std::string& form : own) {
      auto [it, inserted] = owner.emplace(form, c.concept_id);
      if (!inserted && it->second != c.concept_id) {
        std::vector<std::string> both{it->second, c.concept_id};
        std::sort(both.begin(), both.end());
        out.push_back({DiagnosticKind::kDuplicateSynonym, both,
                       "synonym \"" + form + "\" claimed by \"" + both[0] +
                           "\" and \"" + both[1] + "\""});
      }
    }
  }
  return out;
}

std::vector<Concept> with_level_paths(std::vector<Concept> concepts) {
  std::map<std::string, const Concept*> by_id;
  for (const Concept& c : concepts) by_id.emplace(c.concept_id, &c);
  std::vector<std::vector<std::string>> paths(concepts.size());
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    std::vector<std::string> path;
    std::set<std::string> seen{concepts[i].concept_id};
    const Concept* cur = &concepts[i];
    while (cur->parent) {
      auto it = by_id.find(*cur->parent);
      if (it == by_id.end() || !seen.insert(*cur->parent).second) break;
      path.push_back(*cur->parent);
      cur = it->second;
    }
    std::reverse(path.begin(), path.end());
    paths[i] = std::move(path);
  }
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    concepts[i].level_path = std::move(paths[i]);
  }
  return concepts;
}

// ---------------------------------------------------------------------------
// Anatomy edge-file ingestion.

namespace {

// Minimal RFC 4180 field splitter; quotes may wrap fields containing commas.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty() || was_quoted) return std::nullopt;
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      if (was_quoted) return std::nullopt;
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

struct EdgeRow {
  std::string child_id;
  std::string child_name;
  std::string parent_id;
};

}  // namespace

ConceptTable ingest_anatomy(std::string_view csv,
                            const std::vector<std::string>& roots,
                            int max_depth) {
  if (max_depth < 0) {
    throw Error(ErrorCode::kConfig, "max_depth must be non-negative");
  }
  std::vector<EdgeRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos <= csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    std::string_view line = csv.substr(pos, nl == std::string_view::npos
                                                ? std::string_view::npos
                                                : nl - pos);
    pos = nl == std::string_view::npos ? csv.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no);
    if (!fields || fields->size() != 3) {
      throw Error(ErrorCode::kMalformedRow, "expected 3 CSV fields", where);
    }
    if (!header_seen) {
      header_seen = true;
      if (text::to_lower(text::trim((*fields)[0])) == "child_id") continue;
      throw Error(ErrorCode::kMalformedRow,
                  "expected header child_id,child_name,parent_id", where);
    }
    EdgeRow row{std::string(text::trim((*fields)[0])),
                text::normalize_surface((*fields)[1]),
                std::string(text::trim((*fields)[2]))};
    if (row.child_id.empty() || row.child_name.empty()) {
      throw Error(ErrorCode::kMalformedRow, "empty child_id or child_name",
                  where);
    }
    rows.push_back(std::move(row));
  }

  // Node order is first appearance as a child; names in row order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::string>> names;
  std::map<std::string, std::vector<std::string>> children;
  for (const EdgeRow& r : rows) {
    auto [it, inserted] = names.try_emplace(r.child_id);
    if (inserted) order.push_back(r.child_id);
    if (std::find(it->second.begin(), it->second.end(), r.child_name) ==
        it->second.end()) {
      it->second.push_back(r.child_name);
    }
    if (!r.parent_id.empty()) {
      auto& kids = children[r.parent_id];
      if (std::find(kids.begin(), kids.end(), r.child_id) == kids.end()) {
        kids.push_back(r.child_id);
      }
    }
  }

  std::vector<std::string> root_ids;
  for (const std::string& root : roots) {
    const std::string want = text::normalize_surface(root);
    std::optional<std::string> hit;
    for (const std::string& id : order) {
      const auto& ns = names[id];
      if (std::find(ns.begin(), ns.end(), want) != ns.end()) {
        hit = id;
        break;
      }
    }
    if (!hit) {
      for (const std::string& id : order) {
        if (text::to_lower(id) == want) {
          hit = id;
          break;
        }
      }
    }
    if (!hit) throw Error(ErrorCode::kRootNotFound, "root \"" + root + "\" not found");
    if (std::find(root_ids.begin(), root_ids.end(), *hit) == root_ids.end()) {
      root_ids.push_back(*hit);
    }
  }

  // Multi-source BFS: every root starts at depth 0, so the first discovery
  // of a node is at its shallowest depth.
  std::map<std::string, std::optional<std::string>> parent_of;
  std::map<std::string, int> depth_of;
  std::deque<std::string> queue;
  for (const std::string& r : root_ids) {
    parent_of.emplace(r, std::nullopt);
    depth_of.emplace(r, 0);
    queue.push_back(r);
  }
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    int d = depth_of[cur];
    if (d >= max_depth) continue;
    auto it = children.find(cur);
    if (it == children.end()) continue;
    for (const std::string& kid : it->second) {
      if (depth_of.count(kid)) continue;
      depth_of.emplace(kid, d + 1);
      parent_of.emplace(kid, cur);
      queue.push_back(kid);
    }
  }

  std::vector<Concept> concepts;
  for (const std::string& id : order) {
    auto it = parent_of.find(id);
    if (it == parent_of.end()) continue;
    Concept c;
    c.concept_id = id;
    c.parent = it->second;
    c.synonyms = names[id];
    concepts.push_back(std::move(c));
  }
  return ConceptTable(OntologyKind::kAnatomy, with_level_paths(std::move(concepts)));
}

// ---------------------------------------------------------------------------
// JSON import/export.

std::string ontology_to_json(const ConceptTable& table,
                             std::string_view provenance) {
  nlohmann::ordered_json root;
  root["schema_version"] = 1;
  root["ontology"] = std::string(to_string(table.kind()));
  root["provenance"] = std::string(provenance);
  nlohmann::ordered_json concepts = nlohmann::ordered_json::array();
  for (const Concept& c : table.concepts()) {
    nlohmann::ordered_json jc;
    jc["concept_id"] = c.concept_id;
    jc["parent"] = c.parent ? nlohmann::ordered_json(*c.parent)
                            : nlohmann::ordered_json(nullptr);
    jc["synonyms"] = c.synonyms;
    jc["level_path"] = c.level_path;
    concepts.push_back(std::move(jc));
  }
  root["concepts"] = std::move(concepts);
  return root.dump(2) + "\n";
}

ConceptTable ontology_from_json(std::string_view document) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, e.what());
  }
  auto fail = [](const std::string& msg, const std::string& path) {
    throw Error(ErrorCode::kSchema, msg, path);
  };
  if (!root.is_object()) fail("ontology document must be an object", "$");
  if (!root.contains("ontology") || !root["ontology"].is_string()) {
    fail("missing \"ontology\"", "$");
  }
  auto kind = parse_ontology_kind(root["ontology"].get<std::string>());
  if (!kind) fail("unknown ontology kind", "ontology");
  if (!root.contains("concepts") || !root["concepts"].is_array()) {
    fail("missing \"concepts\" array", "$");
  }
  std::vector<Concept> concepts;
  bool paths_given = true;
  const json& arr = root["concepts"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "concepts[" + std::to_string(i) + "]";
    const json& jc = arr[i];
    if (!jc.is_object() || !jc.contains("concept_id") ||
        !jc["concept_id"].is_string()) {
      fail("concept needs a string concept_id", path);
    }
    Concept c;
    c.concept_id = jc["concept_id"].get<std::string>();
    if (jc.contains("parent") && !jc["parent"].is_null()) {
      if (!jc["parent"].is_string()) fail("parent must be a string", path);
      c.parent = jc["parent"].get<std::string>();
    }
    if (jc.contains("synonyms")) {
      if (!jc["synonyms"].is_array()) fail("synonyms must be an array", path);
      for (const json& s : jc["synonyms"]) {
        if (!s.is_string()) fail("synonyms must be strings", path);
        c.synonyms.push_back(s.get<std::string>());
      }
    }
    if (jc.contains("level_path")) {
      if (!jc["level_path"].is_array()) fail("level_path must be an array", path);
      for (const json& s : jc["level_path"]) {
        if (!s.is_string()) fail("level_path must be strings", path);
        c.level_path.push_back(s.get<std::string>());
      }
    } else {
      paths_given = false;
    }
    concepts.push_back(std::move(c));
  }
  if (!paths_given) concepts = with_level_paths(std::move(concepts));
  return ConceptTable(*kind, std::move(concepts));
}

}  // namespace headct
