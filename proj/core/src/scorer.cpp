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

#include "headct_one/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "headct_one/error.hpp"
#include "headct_one/normalizer.hpp"
#include "headct_one/text.hpp"
#include "json.hpp"

namespace headct {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& msg, const std::string& path) {
  throw Error(ErrorCode::kConfig, msg, path);
}

EntityLabel group_label(EntityLabel label, bool merge) {
  if (!merge) return label;
  if (label == EntityLabel::kDevicePresent) return EntityLabel::kObservationPresent;
  if (label == EntityLabel::kDeviceAbsent) return EntityLabel::kObservationAbsent;
  return label;
}

std::string concept_key(const ConceptRef& c) {
  return std::string(to_string(c.ontology)) + ":" + c.concept_id;
}

struct Item {
  std::string key;
  double weight = 0.0;
  std::string description;
};

struct MatchOutcome {
  std::vector<LedgerItem> ledger;
  double matched_weight = 0.0;
  int matched = 0;
};

// Greedy multiset intersection: each pred item takes the earliest unused gt
// item with an equal key. Keys are equality classes, so this is a maximum
// matching and any tie-break yields the same totals.
MatchOutcome match_items(const std::vector<Item>& gt, const std::vector<Item>& pred) {
  MatchOutcome out;
  std::unordered_map<std::string, std::deque<std::size_t>> pool;
  for (std::size_t i = 0; i < gt.size(); ++i) pool[gt[i].key].push_back(i);
  std::vector<bool> gt_used(gt.size(), false);
  // Matched weight is summed per key in key order so that swapping the two
  // sides reproduces the same floating-point value.
  std::map<std::string, std::pair<int, double>> per_key;
  for (const Item& p : pred) {
    auto it = pool.find(p.key);
    if (it != pool.end() && !it->second.empty()) {
      std::size_t g = it->second.front();
      it->second.pop_front();
      gt_used[g] = true;
      out.ledger.push_back({Disposition::kMatched, gt[g].description,
                            p.description, p.key, p.weight});
      auto& slot = per_key[p.key];
      slot.first += 1;
      slot.second = p.weight;
      ++out.matched;
    } else {
      out.ledger.push_back({Disposition::kSpurious, "", p.description, p.key, p.weight});
    }
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt_used[i]) {
      out.ledger.push_back({Disposition::kMissed, gt[i].description, "", gt[i].key,
                            gt[i].weight});
    }
  }
  for (const auto& [key, slot] : per_key) {
    out.matched_weight += slot.first * slot.second;
  }
  return out;
}

// Summed the same way as matched weight, so a side whose items are all
// matched has a total bit-identical to the matched weight.
double total_weight(const std::vector<Item>& items) {
  std::map<std::string, std::pair<int, double>> per_key;
  for (const Item& i : items) {
    auto& slot = per_key[i.key];
    slot.first += 1;
    slot.second = i.weight;
  }
  double sum = 0.0;
  for (const auto& [key, slot] : per_key) sum += slot.first * slot.second;
  return sum;
}

struct GraphItems {
  std::vector<Item> entities;
  std::vector<Item> relations;
};

GraphItems collect(const ReportGraph& g, const WeightScheme& scheme,
                   std::string_view side) {
  for (std::size_t i = 0; i < g.entities.size(); ++i) {
    const Entity& e = g.entities[i];
    if (e.concepts.empty() && !is_marked_unmatched(g, e.id)) {
      throw Error(ErrorCode::kNotNormalized,
                  "entity \"" + e.id + "\" has no concepts",
                  std::string(side) + ":entities[" + std::to_string(i) + "]");
    }
  }
  GraphItems items;
  std::unordered_map<std::string, std::size_t> index;
  for (const Entity& e : g.entities) {
    index.emplace(e.id, items.entities.size());
    const EntityLabel label = group_label(e.label, scheme.merge_device_labels);
    items.entities.push_back({entity_match_key(e, scheme.merge_device_labels),
                              scheme.entity_weight(label, e.concepts),
                              e.id + " \"" + e.text + "\""});
  }
  for (const Relation& r : g.relations) {
    auto s = index.find(r.source);
    auto t = index.find(r.target);
    if (s == index.end() || t == index.end()) {
      throw Error(ErrorCode::kSchema, "relation endpoint does not resolve",
                  std::string(side) + ":" + r.source + "->" + r.target);
    }
    const Item& src = items.entities[s->second];
    const Item& tgt = items.entities[t->second];
    items.relations.push_back(
        {"(" + src.key + ") " + std::string(to_string(r.label)) + " (" + tgt.key + ")",
         scheme.relation_weight(src.weight, tgt.weight),
         r.source + " " + std::string(to_string(r.label)) + " " + r.target});
  }
  return items;
}

F1Component component(const std::vector<Item>& gt, const std::vector<Item>& pred,
                      std::vector<LedgerItem>& ledger) {
  MatchOutcome m = match_items(gt, pred);
  F1Component c = weighted_f1(m.matched_weight, total_weight(gt), total_weight(pred));
  c.gt_items = static_cast<int>(gt.size());
  c.pred_items = static_cast<int>(pred.size());
  c.matched_items = m.matched;
  ledger = std::move(m.ledger);
  return c;
}

}  // namespace

std::string_view to_string(RelationRule rule) {
  switch (rule) {
    case RelationRule::kMaxEndpoint: return "max_endpoint";
    case RelationRule::kMinEndpoint: return "min_endpoint";
    case RelationRule::kMeanEndpoint: return "mean_endpoint";
  }
  return "max_endpoint";
}

std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::kMatched: return "matched";
    case Disposition::kMissed: return "missed";
    case Disposition::kSpurious: return "spurious";
  }
  return "matched";
}

void WeightScheme::validate() const {
  auto check = [](double w, const std::string& path) {
    if (!std::isfinite(w) || w < 0.0) {
      config_error("weights must be finite and non-negative", path);
    }
  };
  for (const auto& [label, w] : type_weights) {
    check(w, "type_weights." + std::string(to_string(label)));
  }
  for (const auto& [key, w] : concept_weights) {
    check(w, "concept_weights." + std::string(to_string(key.first)) + ":" + key.second);
  }
}

double WeightScheme::type_weight(EntityLabel label) const {
  auto it = type_weights.find(label);
  return it == type_weights.end() ? 1.0 : it->second;
}

double WeightScheme::entity_weight(EntityLabel label,
                                   const std::vector<ConceptRef>& concepts) const {
  if (!concept_weights.empty() &&
      (concept_labels.empty() || concept_labels.count(label))) {
    bool hit = false;
    double best = 0.0;
    for (const ConceptRef& c : concepts) {
      auto it = concept_weights.find({c.ontology, c.concept_id});
      if (it == concept_weights.end()) continue;
      best = hit ? std::max(best, it->second) : it->second;
      hit = true;
    }
    if (hit) return best;
  }
  return type_weight(label);
}

double WeightScheme::relation_weight(double source_weight, double target_weight) const {
  switch (relation_rule) {
    case RelationRule::kMaxEndpoint: return std::max(source_weight, target_weight);
    case RelationRule::kMinEndpoint: return std::min(source_weight, target_weight);
    case RelationRule::kMeanEndpoint: return (source_weight + target_weight) / 2.0;
  }
  return std::max(source_weight, target_weight);
}

WeightScheme unit_scheme() {
  WeightScheme s;
  s.name = "unit";
  for (EntityLabel l : kAllEntityLabels) s.type_weights[l] = 1.0;
  return s;
}

WeightScheme scheme_from_flags(int obs_p, int obs_a, int anat, int desc) {
  for (int flag : {obs_p, obs_a, anat, desc}) {
    if (flag != 0 && flag != 1) config_error("entity-type flags must be 0 or 1", "flags");
  }
  WeightScheme s;
  s.name = std::to_string(obs_p) + std::to_string(obs_a) + std::to_string(anat) +
           std::to_string(desc);
  s.type_weights = {
      {EntityLabel::kObservationPresent, obs_p},
      {EntityLabel::kObservationAbsent, obs_a},
      {EntityLabel::kAnatomy, anat},
      {EntityLabel::kDescriptor, desc},
      {EntityLabel::kDevicePresent, 0.0},
      {EntityLabel::kDeviceAbsent, 0.0},
      {EntityLabel::kProcedure, 0.0},
  };
  return s;
}

std::vector<WeightScheme> standard_schemes() {
  return {scheme_from_flags(1, 1, 1, 1), scheme_from_flags(1, 0, 0, 0),
          scheme_from_flags(1, 1, 0, 0), scheme_from_flags(0, 0, 1, 0),
          scheme_from_flags(0, 0, 0, 1)};
}

std::string scheme_to_json(const WeightScheme& scheme) {
  ordered_json j;
  j["name"] = scheme.name;
  ordered_json types = ordered_json::object();
  for (EntityLabel l : kAllEntityLabels) {
    types[std::string(to_string(l))] = scheme.type_weight(l);
  }
  j["type_weights"] = std::move(types);
  ordered_json concepts = ordered_json::object();
  for (const auto& [key, w] : scheme.concept_weights) {
    concepts[std::string(to_string(key.first)) + ":" + key.second] = w;
  }
  j["concept_weights"] = std::move(concepts);
  ordered_json labels = ordered_json::array();
  for (EntityLabel l : scheme.concept_labels) labels.push_back(std::string(to_string(l)));
  j["concept_labels"] = std::move(labels);
  j["relation_rule"] = std::string(to_string(scheme.relation_rule));
  j["merge_device_labels"] = scheme.merge_device_labels;
  return j.dump(2) + "\n";
}

namespace {

WeightScheme scheme_from_value(const json& root) {
  if (!root.is_object()) config_error("scheme must be a JSON object", "$");
  WeightScheme s;
  for (const auto& [key, value] : root.items()) {
    if (key == "name") {
      if (!value.is_string()) config_error("name must be a string", key);
      s.name = value.get<std::string>();
    } else if (key == "type_weights") {
      if (!value.is_object()) config_error("type_weights must be an object", key);
      for (const auto& [label, w] : value.items()) {
        auto l = parse_entity_label(label);
        if (!l) config_error("unknown entity label", key + "." + label);
        if (!w.is_number()) config_error("weight must be a number", key + "." + label);
        s.type_weights[*l] = w.get<double>();
      }
    } else if (key == "concept_weights") {
      auto add = [&](const std::string& onto, const std::string& id, const json& w,
                     const std::string& path) {
        auto kind = parse_ontology_kind(onto);
        if (!kind) config_error("unknown ontology \"" + onto + "\"", path);
        if (id.empty()) config_error("empty concept id", path);
        if (!w.is_number()) config_error("weight must be a number", path);
        s.concept_weights[{*kind, id}] = w.get<double>();
      };
      if (value.is_object()) {
        for (const auto& [k, w] : value.items()) {
          auto colon = k.find(':');
          if (colon == std::string::npos) {
            config_error("concept key must be \"ontology:concept_id\"", key + "." + k);
          }
          add(k.substr(0, colon), k.substr(colon + 1), w, key + "." + k);
        }
      } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          const json& e = value[i];
          const std::string path = key + "[" + std::to_string(i) + "]";
          if (!e.is_object() || !e.contains("ontology") || !e.contains("concept_id") ||
              !e.contains("weight") || !e["ontology"].is_string() ||
              !e["concept_id"].is_string()) {
            config_error("entry needs ontology, concept_id, weight", path);
          }
          add(e["ontology"].get<std::string>(), e["concept_id"].get<std::string>(),
              e["weight"], path);
        }
      } else {
        config_error("concept_weights must be an object or array", key);
      }
    } else if (key == "concept_labels") {
      if (!value.is_array()) config_error("concept_labels must be an array", key);
      for (const json& l : value) {
        auto parsed = l.is_string() ? parse_entity_label(l.get<std::string>())
                                    : std::nullopt;
        if (!parsed) config_error("unknown entity label", key);
        s.concept_labels.insert(*parsed);
      }
    } else if (key == "relation_rule") {
      const std::string r = value.is_string() ? value.get<std::string>() : "";
      if (r == "max_endpoint") {
        s.relation_rule = RelationRule::kMaxEndpoint;
      } else if (r == "min_endpoint") {
        s.relation_rule = RelationRule::kMinEndpoint;
      } else if (r == "mean_endpoint") {
        s.relation_rule = RelationRule::kMeanEndpoint;
      } else {
        config_error("relation_rule must be max_endpoint, min_endpoint or mean_endpoint",
                     key);
      }
    } else if (key == "merge_device_labels") {
      if (!value.is_boolean()) config_error("merge_device_labels must be a boolean", key);
      s.merge_device_labels = value.get<bool>();
    } else if (key == "schema_version") {
      // accepted, unused
    } else {
      config_error("unknown scheme key \"" + key + "\"", key);
    }
  }
  s.validate();
  return s;
}

}  // namespace

WeightScheme scheme_from_json(std::string_view document) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    config_error(e.what(), "$");
  }
  return scheme_from_value(root);
}

WeightScheme load_scheme_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open scheme file", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return scheme_from_json(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), e.message(), path + ":" + e.path());
  }
}

std::string entity_match_key(const Entity& entity, bool merge_device_labels) {
  std::string key(to_string(group_label(entity.label, merge_device_labels)));
  key += "|";
  if (entity.concepts.empty()) {
    return key + "unmatched:" + text::preprocess_mention(entity.text);
  }
  std::vector<std::string> parts;
  for (const ConceptRef& c : entity.concepts) parts.push_back(concept_key(c));
  std::sort(parts.begin(), parts.end());
  return key + text::join(parts, ",");
}

F1Component weighted_f1(double matched_weight, double gt_weight, double pred_weight) {
  F1Component c;
  c.matched_weight = matched_weight;
  c.gt_weight = gt_weight;
  c.pred_weight = pred_weight;
  const bool gt_empty = gt_weight == 0.0;
  const bool pred_empty = pred_weight == 0.0;
  if (gt_empty && pred_empty) {
    c.precision = c.recall = c.f1 = 1.0;
    return c;
  }
  if (gt_empty || pred_empty) {
    c.precision = pred_empty ? 0.0 : matched_weight / pred_weight;
    c.recall = gt_empty ? 0.0 : matched_weight / gt_weight;
    c.f1 = 0.0;
    return c;
  }
  c.precision = std::min(1.0, matched_weight / pred_weight);
  c.recall = std::min(1.0, matched_weight / gt_weight);
  const double denom = c.precision + c.recall;
  c.f1 = denom == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / denom;
  return c;
}

ScoreReport score(const ReportGraph& gt, const ReportGraph& pred,
                  const WeightScheme& scheme) {
  scheme.validate();
  const GraphItems g = collect(gt, scheme, "gt");
  const GraphItems p = collect(pred, scheme, "pred");
  ScoreReport report;
  report.scheme = scheme;
  report.entity = component(g.entities, p.entities, report.entity_ledger);
  report.relation = component(g.relations, p.relations, report.relation_ledger);
  report.headct_one = (report.entity.f1 + report.relation.f1) / 2.0;
  if (report.entity.gt_weight == 0.0 && report.entity.pred_weight == 0.0) {
    report.warnings.push_back(
        "no positively weighted entities on either side; entity F1 set to 1");
  }
  if (report.relation.gt_weight == 0.0 && report.relation.pred_weight == 0.0) {
    report.warnings.push_back(
        "no positively weighted relations on either side; relation F1 set to 1");
  }
  return report;
}

namespace {

ordered_json component_json(const F1Component& c) {
  ordered_json j;
  j["precision"] = c.precision;
  j["recall"] = c.recall;
  j["f1"] = c.f1;
  j["matched_weight"] = c.matched_weight;
  j["gt_weight"] = c.gt_weight;
  j["pred_weight"] = c.pred_weight;
  j["gt_items"] = c.gt_items;
  j["pred_items"] = c.pred_items;
  j["matched_items"] = c.matched_items;
  return j;
}

ordered_json ledger_json(const std::vector<LedgerItem>& ledger) {
  ordered_json arr = ordered_json::array();
  for (const LedgerItem& item : ledger) {
    ordered_json j;
    j["disposition"] = std::string(to_string(item.disposition));
    j["gt"] = item.gt.empty() ? ordered_json(nullptr) : ordered_json(item.gt);
    j["pred"] = item.pred.empty() ? ordered_json(nullptr) : ordered_json(item.pred);
    j["key"] = item.key;
    j["weight"] = item.weight;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

std::string score_report_to_json(const ScoreReport& report, bool include_ledger) {
  ordered_json j;
  j["schema_version"] = 1;
  j["headct_one"] = report.headct_one;
  j["entity"] = component_json(report.entity);
  j["relation"] = component_json(report.relation);
  if (include_ledger) {
    ordered_json ledger;
    ledger["entities"] = ledger_json(report.entity_ledger);
    ledger["relations"] = ledger_json(report.relation_ledger);
    j["ledger"] = std::move(ledger);
  }
  j["scheme"] = ordered_json::parse(scheme_to_json(report.scheme));
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string score_report_to_text(const ScoreReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "HeadCT-ONE " << report.headct_one << "  (scheme "
      << (report.scheme.name.empty() ? "custom" : report.scheme.name) << ")\n";
  out << "component   precision  recall     f1         matched/gt/pred\n";
  auto row = [&](const char* name, const F1Component& c) {
    out << std::left << std::setw(12) << name << std::setw(11) << c.precision
        << std::setw(11) << c.recall << std::setw(11) << c.f1 << c.matched_items
        << "/" << c.gt_items << "/" << c.pred_items << "\n";
  };
  row("entity", report.entity);
  row("relation", report.relation);
  auto ledger = [&](const char* title, const std::vector<LedgerItem>& items) {
    out << title << "\n";
    for (const LedgerItem& i : items) {
      out << "  " << std::setw(9) << to_string(i.disposition) << " w=" << i.weight
          << "  " << i.key << "\n";
    }
  };
  ledger("entities:", report.entity_ledger);
  ledger("relations:", report.relation_ledger);
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::vector<ConceptCount> negation_counts(const std::vector<ReportGraph>& corpus) {
  std::map<std::string, ConceptCount> counts;
  for (const ReportGraph& g : corpus) {
    for (const Entity& e : g.entities) {
      const bool negated = e.label == EntityLabel::kObservationAbsent;
      const bool present = e.label == EntityLabel::kObservationPresent;
      if (!negated && !present) continue;
      for (const ConceptRef& c : e.concepts) {
        if (c.ontology != OntologyKind::kFinding) continue;
        ConceptCount& slot = counts[c.concept_id];
        slot.concept_id = c.concept_id;
        (negated ? slot.negated : slot.present) += 1;
      }
    }
  }
  std::vector<ConceptCount> out;
  for (auto& [_, c] : counts) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(), [](const ConceptCount& a, const ConceptCount& b) {
    if (a.negated != b.negated) return a.negated > b.negated;
    return a.concept_id < b.concept_id;
  });
  return out;
}

TopKScheme top_k_scheme(const std::vector<ReportGraph>& corpus, int k,
                        double multiplier) {
  if (corpus.empty()) config_error("top-k weighting needs a non-empty corpus", "corpus");
  if (k < 1) config_error("k must be positive", "k");
  if (!std::isfinite(multiplier) || multiplier < 1.0) {
    config_error("multiplier must be >= 1", "multiplier");
  }
  TopKScheme out;
  out.scheme = scheme_from_flags(1, 0, 0, 0);
  out.scheme.name = "top" + std::to_string(k);
  out.scheme.concept_labels = {EntityLabel::kObservationPresent};
  for (const ConceptCount& c : negation_counts(corpus)) {
    if (c.negated == 0) break;
    if (static_cast<int>(out.ranking.size()) == k) break;
    out.ranking.push_back(c);
    out.scheme.concept_weights[{OntologyKind::kFinding, c.concept_id}] = multiplier;
  }
  if (static_cast<int>(out.ranking.size()) < k) {
    out.warnings.push_back(std::string(error_code_name(ErrorCode::kCorpusTooSmall)) +
                           ": only " + std::to_string(out.ranking.size()) +
                           " negated concepts for k=" + std::to_string(k));
  }
  return out;
}

}  // namespace headct
