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

#include "headct_one/normalizer.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "headct_one/error.hpp"
#include "headct_one/text.hpp"
#include "json.hpp"

namespace headct {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kMaxSplitDepth = 4;
constexpr std::size_t kTopCandidates = 5;

[[noreturn]] void config_error(const std::string& msg, const std::string& path) {
  throw Error(ErrorCode::kConfig, msg, path);
}

bool has_children(const ConceptTable& table, std::string_view id) {
  for (const Concept& c : table.concepts()) {
    if (c.parent && *c.parent == id) return true;
  }
  return false;
}

}  // namespace

std::vector<SplitRule> default_split_rules() {
  return {{"fronto", "frontal"},     {"parieto", "parietal"},
          {"temporo", "temporal"},   {"occipito", "occipital"},
          {"spheno", "sphenoid"},    {"ethmo", "ethmoid"}};
}

void NormalizationConfig::validate() const {
  for (std::size_t i = 0; i < split_rules.size(); ++i) {
    const auto& r = split_rules[i];
    const std::string path = "split_rules[" + std::to_string(i) + "]";
    if (r.prefix.empty()) config_error("empty split prefix", path);
    if (r.prefix != text::to_lower(r.prefix)) {
      config_error("split prefix must be lowercase", path);
    }
    if (text::trim(r.concept_name).empty()) {
      config_error("empty split concept", path);
    }
  }
  if (!(unmatched_threshold >= 0.0 && unmatched_threshold <= 1.0)) {
    config_error("unmatched_threshold must lie in [0,1]", "unmatched_threshold");
  }
  if (provider == ProviderKind::kExternal && classifier_endpoint.empty()) {
    config_error("provider \"external\" needs classifier_endpoint", "provider");
  }
  if (!(classifier_timeout_seconds > 0.0)) {
    config_error("classifier_timeout_seconds must be positive",
                 "classifier_timeout_seconds");
  }
}

NormalizationConfig load_normalization_config(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    config_error(e.what(), "$");
  }
  if (!root.is_object()) config_error("config must be a JSON object", "$");
  NormalizationConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key == "split_rules") {
      cfg.split_rules.clear();
      if (value.is_object()) {
        for (const auto& [prefix, name] : value.items()) {
          if (!name.is_string()) config_error("split concept must be a string", key + "." + prefix);
          cfg.split_rules.push_back({prefix, name.get<std::string>()});
        }
      } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          const json& r = value[i];
          const std::string path = key + "[" + std::to_string(i) + "]";
          if (!r.is_object() || !r.contains("prefix") || !r.contains("concept") ||
              !r["prefix"].is_string() || !r["concept"].is_string()) {
            config_error("split rule needs string prefix and concept", path);
          }
          cfg.split_rules.push_back(
              {r["prefix"].get<std::string>(), r["concept"].get<std::string>()});
        }
      } else {
        config_error("split_rules must be an array or object", key);
      }
    } else if (key == "laterality_tokens") {
      if (!value.is_array()) config_error("laterality_tokens must be an array", key);
      cfg.laterality_tokens.clear();
      for (const json& t : value) {
        if (!t.is_string()) config_error("laterality tokens must be strings", key);
        cfg.laterality_tokens.push_back(text::normalize_surface(t.get<std::string>()));
      }
    } else if (key == "unmatched_threshold") {
      if (!value.is_number()) config_error("unmatched_threshold must be a number", key);
      cfg.unmatched_threshold = value.get<double>();
    } else if (key == "provider") {
      if (!value.is_string()) config_error("provider must be a string", key);
      const std::string p = value.get<std::string>();
      if (p == "trigram") {
        cfg.provider = ProviderKind::kTrigram;
      } else if (p == "external") {
        cfg.provider = ProviderKind::kExternal;
      } else {
        config_error("provider must be \"trigram\" or \"external\"", key);
      }
    } else if (key == "classifier_endpoint") {
      if (!value.is_string()) config_error("classifier_endpoint must be a string", key);
      cfg.classifier_endpoint = value.get<std::string>();
    } else if (key == "classifier_timeout_seconds") {
      if (!value.is_number()) config_error("classifier_timeout_seconds must be a number", key);
      cfg.classifier_timeout_seconds = value.get<double>();
    } else if (key == "schema_version") {
      // accepted, unused
    } else {
      config_error("unknown config key \"" + key + "\"", key);
    }
  }
  cfg.validate();
  return cfg;
}

NormalizationConfig load_normalization_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open config file", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_normalization_config(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), e.message(), path + ":" + e.path());
  }
}

std::string_view to_string(NormalizationMethod method) {
  switch (method) {
    case NormalizationMethod::kExact: return "exact";
    case NormalizationMethod::kSplit: return "split";
    case NormalizationMethod::kSimilarity: return "similarity";
    case NormalizationMethod::kClassifier: return "classifier";
    case NormalizationMethod::kUnmatched: return "unmatched";
  }
  return "unknown";
}

std::optional<NormalizationMethod> parse_normalization_method(std::string_view s) {
  for (auto m : {NormalizationMethod::kExact, NormalizationMethod::kSplit,
                 NormalizationMethod::kSimilarity, NormalizationMethod::kClassifier,
                 NormalizationMethod::kUnmatched}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::string outcome_to_json(const NormalizationOutcome& o) {
  ordered_json j;
  if (!o.entity_id.empty()) j["entity_id"] = o.entity_id;
  j["method"] = std::string(to_string(o.method));
  if (!o.concepts.empty()) j["ontology"] = std::string(to_string(o.concepts.front().ontology));
  ordered_json concepts = ordered_json::array();
  for (const ConceptRef& c : o.concepts) {
    concepts.push_back(ordered_json::array({c.concept_id, c.similarity}));
  }
  j["concepts"] = std::move(concepts);
  if (!o.candidates.empty()) {
    ordered_json cands = ordered_json::array();
    for (const Candidate& c : o.candidates) {
      cands.push_back(ordered_json::array({c.concept_id, c.similarity}));
    }
    j["candidates"] = std::move(cands);
  }
  if (!o.stripped.empty()) j["stripped"] = o.stripped;
  if (o.method == NormalizationMethod::kSplit) j["components"] = o.component_texts;
  if (!o.notes.empty()) j["notes"] = o.notes;
  return j.dump();
}

NormalizationOutcome outcome_from_json(std::string_view document) {
  NormalizationOutcome o;
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, e.what());
  }
  if (!j.is_object() || !j.contains("method") || !j["method"].is_string()) {
    throw Error(ErrorCode::kSchema, "normalization record needs a method");
  }
  auto m = parse_normalization_method(j["method"].get<std::string>());
  if (!m) throw Error(ErrorCode::kSchema, "unknown normalization method");
  o.method = *m;
  if (j.contains("entity_id")) {
    if (!j["entity_id"].is_string()) throw Error(ErrorCode::kSchema, "entity_id must be a string");
    o.entity_id = j["entity_id"].get<std::string>();
  }
  OntologyKind kind = OntologyKind::kFinding;
  if (j.contains("ontology")) {
    auto k = j["ontology"].is_string() ? parse_ontology_kind(j["ontology"].get<std::string>())
                                       : std::nullopt;
    if (!k) throw Error(ErrorCode::kSchema, "unknown ontology in normalization record");
    kind = *k;
  }
  auto pairs = [&](const char* key, auto&& sink) {
    if (!j.contains(key)) return;
    for (const json& p : j[key]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_number()) {
        throw Error(ErrorCode::kSchema, std::string("bad ") + key + " entry");
      }
      sink(p[0].get<std::string>(), p[1].get<double>());
    }
  };
  pairs("concepts", [&](std::string id, double s) {
    o.concepts.push_back({kind, std::move(id), s});
  });
  pairs("candidates", [&](std::string id, double s) {
    o.candidates.push_back({std::move(id), s});
  });
  auto strings = [&](const char* key, std::vector<std::string>& out) {
    if (!j.contains(key)) return;
    for (const json& s : j[key]) {
      if (!s.is_string()) throw Error(ErrorCode::kSchema, std::string("bad ") + key);
      out.push_back(s.get<std::string>());
    }
  };
  strings("stripped", o.stripped);
  strings("components", o.component_texts);
  strings("notes", o.notes);
  return o;
}

// ---------------------------------------------------------------------------

struct Normalizer::Resolution {
  std::vector<std::string> concept_ids;
  std::vector<double> similarities;
  std::vector<std::string> texts;
  NormalizationMethod method = NormalizationMethod::kExact;
  std::vector<Candidate> candidates;
  std::vector<std::string> stripped;
  std::vector<std::string> notes;
};

Normalizer::Normalizer(const OntologySet& ontologies, NormalizationConfig config,
                       std::shared_ptr<const SimilarityProvider> provider,
                       std::shared_ptr<DescriptorClassifier> classifier)
    : ontologies_(&ontologies),
      config_(std::move(config)),
      provider_(std::move(provider)),
      classifier_(std::move(classifier)) {
  config_.validate();
  if (!provider_) provider_ = std::make_shared<TrigramDiceSimilarity>();
}

Normalizer::Resolution Normalizer::similarity_tier(std::string_view text,
                                                   const ConceptTable& table) const {
  // Descriptor assignments always land on a deepest level.
  const bool leaves_only = table.kind() == OntologyKind::kDescriptor;
  std::map<std::string, double> best;
  for (const auto& [form, id] : table.surface_forms()) {
    if (leaves_only && has_children(table, id)) continue;
    double s = provider_->similarity(text, form);
    auto [it, inserted] = best.emplace(id, s);
    if (!inserted && s > it->second) it->second = s;
  }
  std::vector<Candidate> ranked;
  ranked.reserve(best.size());
  for (const auto& [id, s] : best) ranked.push_back({id, s});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.similarity != b.similarity) return a.similarity > b.similarity;
                     return a.concept_id < b.concept_id;
                   });
  Resolution r;
  r.method = NormalizationMethod::kSimilarity;
  if (ranked.empty()) {
    r.method = NormalizationMethod::kUnmatched;
    r.notes.push_back("target table has no candidates");
    return r;
  }
  const Candidate top = ranked.front();
  if (ranked.size() > kTopCandidates) ranked.resize(kTopCandidates);
  r.candidates = std::move(ranked);
  if (config_.unmatched_threshold > 0.0 && top.similarity < config_.unmatched_threshold) {
    r.method = NormalizationMethod::kUnmatched;
    return r;
  }
  r.concept_ids.push_back(top.concept_id);
  r.similarities.push_back(top.similarity);
  r.texts.emplace_back(text);
  return r;
}

std::optional<std::vector<std::string>> Normalizer::split_token(
    std::string_view token, const ConceptTable& table, int depth) const {
  for (const SplitRule& rule : config_.split_rules) {
    if (token.size() <= rule.prefix.size() || !token.starts_with(rule.prefix)) {
      continue;
    }
    std::string_view rest = token.substr(rule.prefix.size());
    while (!rest.empty() && rest.front() == '-') rest.remove_prefix(1);
    if (rest.empty()) continue;
    if (table.lookup(rest)) {
      return std::vector<std::string>{rule.concept_name, std::string(rest)};
    }
    if (depth < kMaxSplitDepth) {
      if (auto sub = split_token(rest, table, depth + 1)) {
        std::vector<std::string> parts{rule.concept_name};
        parts.insert(parts.end(), sub->begin(), sub->end());
        return parts;
      }
    }
  }
  return std::nullopt;
}

std::optional<std::vector<std::string>> Normalizer::split_text(
    std::string_view text, const ConceptTable& table) const {
  const auto words = text::split_words(text);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (table.lookup(words[i])) continue;
    auto parts = split_token(words[i], table, 0);
    if (!parts) continue;
    std::vector<std::string> texts;
    for (const std::string& part : *parts) {
      auto replaced = words;
      replaced[i] = part;
      texts.push_back(text::join(replaced, " "));
    }
    return texts;
  }
  return std::nullopt;
}

Normalizer::Resolution Normalizer::resolve(std::string_view raw,
                                           const ConceptTable& table,
                                           bool allow_split, int depth) const {
  const std::string t = text::preprocess_mention(raw);
  Resolution r;
  // (2) combining-form split, unless the whole mention is already known.
  if (allow_split && depth < kMaxSplitDepth && !table.lookup(t)) {
    if (auto parts = split_text(t, table)) {
      r.method = NormalizationMethod::kSplit;
      for (const std::string& part : *parts) {
        Resolution sub = resolve(part, table, true, depth + 1);
        r.stripped.insert(r.stripped.end(), sub.stripped.begin(), sub.stripped.end());
        r.notes.insert(r.notes.end(), sub.notes.begin(), sub.notes.end());
        if (!sub.candidates.empty()) r.candidates = sub.candidates;
        if (sub.method == NormalizationMethod::kUnmatched) {
          r.notes.push_back("component \"" + part + "\" unmatched");
          continue;
        }
        r.concept_ids.insert(r.concept_ids.end(), sub.concept_ids.begin(), sub.concept_ids.end());
        r.similarities.insert(r.similarities.end(), sub.similarities.begin(), sub.similarities.end());
        r.texts.insert(r.texts.end(), sub.texts.begin(), sub.texts.end());
      }
      if (r.concept_ids.empty()) r.method = NormalizationMethod::kUnmatched;
      return r;
    }
  }
  // (3) exact / synonym.
  if (auto id = table.lookup(t)) {
    r.concept_ids.push_back(*id);
    r.similarities.push_back(1.0);
    r.texts.push_back(t);
    return r;
  }
  // (4) laterality strip-and-retry.
  if (!config_.laterality_tokens.empty()) {
    std::vector<std::string> kept, stripped;
    for (std::string& w : text::split_words(t)) {
      bool lateral = std::find(config_.laterality_tokens.begin(),
                               config_.laterality_tokens.end(),
                               w) != config_.laterality_tokens.end();
      (lateral ? stripped : kept).push_back(std::move(w));
    }
    if (!stripped.empty() && !kept.empty()) {
      if (auto id = table.lookup(text::join(kept, " "))) {
        r.concept_ids.push_back(*id);
        r.similarities.push_back(1.0);
        r.texts.push_back(t);
        r.stripped = std::move(stripped);
        return r;
      }
    }
  }
  // (5)/(6) similarity fallback with optional threshold.
  return similarity_tier(t, table);
}

NormalizationOutcome Normalizer::finish(const Entity& entity, Resolution r,
                                        const ConceptTable& table) const {
  NormalizationOutcome o;
  o.entity_id = entity.id;
  o.method = r.method;
  for (std::size_t i = 0; i < r.concept_ids.size(); ++i) {
    o.concepts.push_back({table.kind(), r.concept_ids[i], r.similarities[i]});
  }
  o.candidates = std::move(r.candidates);
  o.stripped = std::move(r.stripped);
  o.component_texts = std::move(r.texts);
  o.notes = std::move(r.notes);
  return o;
}

NormalizationOutcome Normalizer::normalize_entity(const Entity& entity) const {
  if (entity.label == EntityLabel::kDescriptor) return normalize_descriptor(entity);
  const ConceptTable& table = ontologies_->table(target_ontology(entity.label));
  const bool allow_split = table.kind() == OntologyKind::kAnatomy;
  return finish(entity, resolve(entity.text, table, allow_split, 0), table);
}

NormalizationOutcome Normalizer::normalize_descriptor(const Entity& entity) const {
  const ConceptTable& table = ontologies_->descriptor;
  const std::string t = text::preprocess_mention(entity.text);
  Resolution r;
  if (auto id = table.lookup(t)) {
    r.concept_ids.push_back(*id);
    r.similarities.push_back(1.0);
    r.texts.push_back(t);
    return finish(entity, std::move(r), table);
  }
  std::vector<std::string> notes;
  if (classifier_) {
    try {
      if (auto category = classifier_->classify(t)) {
        if (table.contains(*category)) {
          r.method = NormalizationMethod::kClassifier;
          r.concept_ids.push_back(*category);
          double s = 0.0;
          for (const auto& [form, id] : table.surface_forms()) {
            if (id == *category) s = std::max(s, provider_->similarity(t, form));
          }
          r.similarities.push_back(s);
          r.texts.push_back(t);
          return finish(entity, std::move(r), table);
        }
        notes.push_back("classifier returned unknown category \"" + *category + "\"");
      } else {
        notes.push_back("classifier declined");
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kClassifierUnavailable) throw;
      notes.push_back(e.what());
    }
  }
  Resolution sim = similarity_tier(t, table);
  sim.notes.insert(sim.notes.begin(), notes.begin(), notes.end());
  return finish(entity, std::move(sim), table);
}

ReportGraph Normalizer::normalize_graph(
    const ReportGraph& graph, std::vector<NormalizationOutcome>* outcomes) const {
  ReportGraph out;
  out.report_id = graph.report_id;
  out.meta = graph.meta;
  std::set<std::string> used_ids;
  for (const Entity& e : graph.entities) used_ids.insert(e.id);
  std::map<std::string, std::vector<std::string>> expansion;

  for (const Entity& e : graph.entities) {
    if (!e.concepts.empty()) {
      out.entities.push_back(e);
      expansion[e.id] = {e.id};
      continue;
    }
    NormalizationOutcome o = normalize_entity(e);
    out.meta[std::string(kOutcomeMetaPrefix) + e.id] = outcome_to_json(o);
    if (o.method == NormalizationMethod::kSplit && o.concepts.size() > 1) {
      auto& ids = expansion[e.id];
      for (std::size_t i = 0; i < o.concepts.size(); ++i) {
        Entity product = e;
        std::string id = e.id + "#" + std::to_string(i + 1);
        while (used_ids.count(id)) id += "'";
        used_ids.insert(id);
        product.id = id;
        product.text = o.component_texts[i];
        product.concepts = {o.concepts[i]};
        ids.push_back(id);
        out.entities.push_back(std::move(product));
      }
    } else {
      Entity copy = e;
      copy.concepts = o.concepts;
      out.entities.push_back(std::move(copy));
      expansion[e.id] = {e.id};
    }
    if (outcomes) outcomes->push_back(std::move(o));
  }
  for (const Relation& r : graph.relations) {
    for (const std::string& s : expansion[r.source]) {
      for (const std::string& t : expansion[r.target]) {
        out.relations.push_back({s, r.label, t});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<DescriptorClassifier> classifier_for(const NormalizationConfig& cfg) {
  if (cfg.provider != ProviderKind::kExternal) return nullptr;
  return std::make_shared<HttpDescriptorClassifier>(cfg.classifier_endpoint,
                                                    cfg.classifier_timeout_seconds);
}

}  // namespace

NormalizationOutcome normalize_entity(const Entity& entity,
                                      const OntologySet& ontologies,
                                      const NormalizationConfig& config) {
  return Normalizer(ontologies, config, nullptr, classifier_for(config))
      .normalize_entity(entity);
}

NormalizationOutcome normalize_descriptor(
    const Entity& entity, const OntologySet& ontologies,
    const NormalizationConfig& config,
    std::shared_ptr<DescriptorClassifier> classifier) {
  if (!classifier) classifier = classifier_for(config);
  return Normalizer(ontologies, config, nullptr, std::move(classifier))
      .normalize_descriptor(entity);
}

ReportGraph normalize_graph(const ReportGraph& graph,
                            const OntologySet& ontologies,
                            const NormalizationConfig& config) {
  return Normalizer(ontologies, config, nullptr, classifier_for(config))
      .normalize_graph(graph);
}

bool is_marked_unmatched(const ReportGraph& graph, std::string_view entity_id) {
  auto it = graph.meta.find(std::string(kOutcomeMetaPrefix) + std::string(entity_id));
  if (it == graph.meta.end()) return false;
  try {
    return outcome_from_json(it->second).method == NormalizationMethod::kUnmatched;
  } catch (const Error&) {
    return false;
  }
}

bool is_normalized(const ReportGraph& graph) {
  for (const Entity& e : graph.entities) {
    if (e.concepts.empty() && !is_marked_unmatched(graph, e.id)) return false;
  }
  return true;
}

}  // namespace headct
