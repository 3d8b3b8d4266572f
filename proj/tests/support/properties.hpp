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

#ifndef HEADCT_TESTS_SUPPORT_PROPERTIES_HPP_
#define HEADCT_TESTS_SUPPORT_PROPERTIES_HPP_

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "headct_one/gazetteer.hpp"
#include "headct_one/normalizer.hpp"
#include "headct_one/ontology.hpp"
#include "headct_one/scorer.hpp"
#include "test_support.hpp"

// Randomized invariant checks shared by the unit suite and the acceptance
// runner. Each returns the number of cases run and the first failure.

namespace headct::testing {

struct PropertyResult {
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
};

inline std::string mutate_surface(GraphGen& gen, std::string s) {
  const int edits = gen.uniform(0, 2);
  for (int i = 0; i < edits && !s.empty(); ++i) {
    const auto pos = static_cast<std::size_t>(gen.uniform(0, static_cast<int>(s.size()) - 1));
    switch (gen.uniform(0, 2)) {
      case 0: s.erase(pos, 1); break;
      case 1: s.insert(pos, 1, static_cast<char>('a' + gen.uniform(0, 25))); break;
      default: s[pos] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[pos])));
    }
  }
  return text::trim(s).empty() ? "x" : s;
}

// Raw (unnormalized) graph whose mentions are ontology surface forms with
// laterality, split prefixes and typos mixed in.
inline ReportGraph raw_graph(GraphGen& gen, const std::string& report_id) {
  static const std::vector<std::string> prefixes = {"", "", "", "left ", "right ", "bilateral ",
                                                    "fronto", "parieto-", "temporo"};
  const OntologySet& onts = builtin_ontologies();
  ReportGraph g;
  g.report_id = report_id;
  const int count = gen.uniform(0, 6);
  for (int i = 0; i < count; ++i) {
    Entity e;
    e.id = "e" + std::to_string(i + 1);
    e.label = kAllEntityLabels[static_cast<std::size_t>(gen.uniform(0, 6))];
    const auto& forms = onts.table(target_ontology(e.label)).surface_forms();
    e.text = mutate_surface(gen, gen.pick(prefixes) + gen.pick(forms).first);
    g.entities.push_back(std::move(e));
  }
  const int rels = count >= 2 ? gen.uniform(0, 3) : 0;
  for (int i = 0; i < rels; ++i) {
    const std::size_t t = static_cast<std::size_t>(gen.uniform(1, count - 1));
    const RelationLabel label = gen.pick(std::vector<RelationLabel>(
        std::begin(kAllRelationLabels), std::end(kAllRelationLabels)));
    if (relation_allowed(label, g.entities[0].label, g.entities[t].label)) {
      g.relations.push_back({g.entities[0].id, label, g.entities[t].id});
    }
  }
  return g;
}

inline PropertyResult check_idempotent_normalization(std::uint64_t seed, int cases) {
  GraphGen gen(seed);
  PropertyResult r;
  for (int i = 0; i < cases; ++i, ++r.cases) {
    NormalizationConfig cfg;
    if (gen.coin(0.3)) cfg.unmatched_threshold = 0.6;
    const ReportGraph raw = raw_graph(gen, "raw" + std::to_string(i));
    const ReportGraph once = normalize_graph(raw, builtin_ontologies(), cfg);
    if (!is_normalized(once)) r.fail("not normalized: " + save_graph(raw));
    if (normalize_graph(once, builtin_ontologies(), cfg) != once) {
      r.fail("second pass changed: " + save_graph(raw));
    }
  }
  return r;
}

inline PropertyResult check_symmetry(std::uint64_t seed, int cases) {
  GraphGen gen(seed);
  PropertyResult r;
  for (int i = 0; i < cases; ++i, ++r.cases) {
    const ReportGraph a = gen.graph("a");
    const ReportGraph b = gen.coin() ? gen.perturb(a, "b") : gen.graph("b");
    const WeightScheme s = gen.scheme(gen.coin());
    const ScoreReport ab = score(a, b, s);
    const ScoreReport ba = score(b, a, s);
    if (ab.entity.f1 != ba.entity.f1 || ab.entity.precision != ba.entity.recall ||
        ab.relation.f1 != ba.relation.f1 || ab.headct_one != ba.headct_one) {
      r.fail("case " + std::to_string(i));
    }
  }
  return r;
}

inline PropertyResult check_identity(std::uint64_t seed, int cases) {
  GraphGen gen(seed);
  PropertyResult r;
  for (int i = 0; i < cases; ++i, ++r.cases) {
    const ReportGraph g = gen.graph("g");
    const WeightScheme s = gen.scheme(gen.coin());
    const ScoreReport rep = score(g, g, s);
    if (rep.headct_one != 1.0) {
      r.fail(save_graph(g) + scheme_to_json(s) + score_report_to_json(rep, true));
    }
  }
  return r;
}

inline WeightScheme scaled_scheme(WeightScheme s, double c) {
  for (auto& [_, w] : s.type_weights) w *= c;
  for (EntityLabel l : kAllEntityLabels) s.type_weights.try_emplace(l, c);
  for (auto& [_, w] : s.concept_weights) w *= c;
  return s;
}

// Power-of-two factors must leave F1 bit-identical; arbitrary factors
// within 1e-12.
inline PropertyResult check_scale_invariance(std::uint64_t seed, int cases) {
  GraphGen gen(seed);
  PropertyResult r;
  for (int i = 0; i < cases; ++i, ++r.cases) {
    const ReportGraph a = gen.graph("a");
    const ReportGraph b = gen.perturb(a, "b");
    const WeightScheme s = gen.scheme(true);
    const ScoreReport base = score(a, b, s);
    const ScoreReport exact = score(a, b, scaled_scheme(s, std::ldexp(1.0, gen.uniform(-3, 6))));
    const double c = std::uniform_real_distribution<double>(0.01, 100.0)(gen.rng());
    const ScoreReport any = score(a, b, scaled_scheme(s, c));
    if (exact.entity.f1 != base.entity.f1 || exact.relation.f1 != base.relation.f1 ||
        std::abs(any.entity.f1 - base.entity.f1) > 1e-12 ||
        std::abs(any.relation.f1 - base.relation.f1) > 1e-12) {
      r.fail("case " + std::to_string(i));
    }
  }
  return r;
}

// Removes one positively weighted prediction whose key is fully matched
// (pred holds no more copies than gt). Surplus copies are skipped: dropping
// one of those removes a spurious item and may legitimately raise F1.
inline PropertyResult check_monotone_sensitivity(std::uint64_t seed, int cases) {
  GraphGen gen(seed);
  PropertyResult r;
  for (int attempt = 0; r.cases < cases && attempt < 50 * cases; ++attempt) {
    const ReportGraph gt = gen.graph("gt");
    const ReportGraph pred = gen.perturb(gt, "pred");
    const WeightScheme s = gen.scheme(true);
    std::map<std::string, int> gt_count, pred_count;
    for (const Entity& e : gt.entities) gt_count[entity_match_key(e, s.merge_device_labels)]++;
    for (const Entity& e : pred.entities) pred_count[entity_match_key(e, s.merge_device_labels)]++;
    std::vector<std::string> removable;
    for (const Entity& e : pred.entities) {
      const std::string key = entity_match_key(e, s.merge_device_labels);
      if (pred_count[key] <= gt_count[key] &&
          s.entity_weight(oracle_detail::group(e.label, s.merge_device_labels), e.concepts) > 0.0) {
        removable.push_back(e.id);
      }
    }
    if (removable.empty()) continue;
    ++r.cases;
    const std::string removed = gen.pick(removable);
    ReportGraph smaller = pred;
    std::erase_if(smaller.entities, [&](const Entity& e) { return e.id == removed; });
    std::erase_if(smaller.relations,
                  [&](const Relation& x) { return x.source == removed || x.target == removed; });
    if (score(gt, smaller, s).entity.f1 > score(gt, pred, s).entity.f1) {
      r.fail("removing " + removed + " from " + save_graph(pred));
    }
  }
  return r;
}

inline PropertyResult check_round_trip(std::uint64_t seed, int cases) {
  GraphGen gen(seed);
  PropertyResult r;
  for (int i = 0; i < cases; ++i, ++r.cases) {
    const ReportGraph g = gen.graph("g" + std::to_string(i));
    const std::string doc = save_graph(g);
    if (save_graph(load_graph(doc, LoadMode::kLenient).graph) != doc) r.fail(doc);
    const std::string scheme_doc = scheme_to_json(gen.scheme(false));
    if (scheme_to_json(scheme_from_json(scheme_doc)) != scheme_doc) r.fail(scheme_doc);
  }
  return r;
}

// Random rooted DAG edge files: the ingested table grows with depth, stays
// valid, and reaches every node once depth covers the longest path.
inline PropertyResult check_ingest_monotone(std::uint64_t seed, int cases) {
  GraphGen gen(seed);
  PropertyResult r;
  for (int i = 0; i < cases; ++i, ++r.cases) {
    const int n = gen.uniform(2, 25);
    std::string csv = "child_id,child_name,parent_id\nn0,node 0,\n";
    for (int k = 1; k < n; ++k) {
      const int parents = gen.uniform(1, std::min(k, 2));
      for (int p = 0; p < parents; ++p) {
        csv += "n" + std::to_string(k) + ",node " + std::to_string(k) + ",n" +
               std::to_string(gen.uniform(0, k - 1)) + "\n";
      }
    }
    std::size_t previous = 0;
    for (int depth = 0; depth <= n; ++depth) {
      const ConceptTable t = ingest_anatomy(csv, {"n0"}, depth);
      if (t.size() < previous || !validate_ontology(t).empty()) r.fail(csv);
      previous = t.size();
    }
    if (previous != static_cast<std::size_t>(n)) r.fail("unreached nodes: " + csv);
  }
  return r;
}

inline PropertyResult check_gazetteer_strict_valid(std::uint64_t seed, int cases) {
  static const std::vector<std::string> filler = {"the", "with", "and", "no", "without",
                                                  "in", "of", ".", ",", "there", "is"};
  GraphGen gen(seed);
  const OntologySet& onts = builtin_ontologies();
  PropertyResult r;
  for (int i = 0; i < cases; ++i, ++r.cases) {
    std::string text;
    const int words = gen.uniform(0, 20);
    for (int w = 0; w < words; ++w) {
      const ConceptTable& t = onts.table(gen.pick(std::vector<OntologyKind>{
          OntologyKind::kFinding, OntologyKind::kAnatomy, OntologyKind::kDescriptor}));
      text += (gen.coin() ? gen.pick(t.surface_forms()).first : gen.pick(filler)) + " ";
    }
    try {
      const ReportGraph g = gazetteer_extract(text, onts, "gz");
      validate_graph(g, LoadMode::kStrict);
      load_graph(save_graph(g), LoadMode::kStrict);
    } catch (const std::exception& e) {
      r.fail(text + ": " + e.what());
    }
  }
  return r;
}

}  // namespace headct::testing

#endif  // HEADCT_TESTS_SUPPORT_PROPERTIES_HPP_
