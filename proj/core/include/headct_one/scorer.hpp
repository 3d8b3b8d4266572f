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

#ifndef HEADCT_ONE_SCORER_HPP_
#define HEADCT_ONE_SCORER_HPP_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "headct_one/graph.hpp"

namespace headct {

enum class RelationRule { kMaxEndpoint, kMinEndpoint, kMeanEndpoint };

std::string_view to_string(RelationRule rule);

struct WeightScheme {
  std::string name;
  // Labels absent from the map weigh 1.
  std::map<EntityLabel, double> type_weights;
  std::map<std::pair<OntologyKind, std::string>, double> concept_weights;
  // Labels whose entities concept_weights apply to. Empty means all.
  std::set<EntityLabel> concept_labels;
  RelationRule relation_rule = RelationRule::kMaxEndpoint;
  // Matches device_present with observation_present and device_absent with
  // observation_absent. Weights are then looked up under the merged label.
  bool merge_device_labels = false;

  // Throws kConfig for negative or non-finite weights.
  void validate() const;

  double type_weight(EntityLabel label) const;
  double entity_weight(EntityLabel label,
                       const std::vector<ConceptRef>& concepts) const;
  double relation_weight(double source_weight, double target_weight) const;

  friend bool operator==(const WeightScheme&, const WeightScheme&) = default;
};

// Every label weighs 1.
WeightScheme unit_scheme();

// Flags for (OBS-P, OBS-A, ANAT, DESC); each must be 0 or 1. Device and
// procedure labels weigh 0.
WeightScheme scheme_from_flags(int obs_p, int obs_a, int anat, int desc);

// The five entity-type schemes compared in the modification experiment:
// 1111, 1000, 1100, 0010, 0001.
std::vector<WeightScheme> standard_schemes();

std::string scheme_to_json(const WeightScheme& scheme);
// Keys: name, type_weights, concept_weights, concept_labels, relation_rule,
// merge_device_labels. Unknown keys and bad values throw kConfig with a path.
WeightScheme scheme_from_json(std::string_view document);
WeightScheme load_scheme_file(const std::string& path);

// Entity key: label group plus the sorted concept list.
std::string entity_match_key(const Entity& entity, bool merge_device_labels);

enum class Disposition { kMatched, kMissed, kSpurious };
std::string_view to_string(Disposition d);

struct LedgerItem {
  Disposition disposition = Disposition::kMatched;
  std::string gt;    // item description on the reference side, if any
  std::string pred;  // item description on the candidate side, if any
  std::string key;
  double weight = 0.0;
};

struct F1Component {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double matched_weight = 0.0;
  double gt_weight = 0.0;
  double pred_weight = 0.0;
  int gt_items = 0;
  int pred_items = 0;
  int matched_items = 0;
};

struct ScoreReport {
  double headct_one = 0.0;
  F1Component entity;
  F1Component relation;
  std::vector<LedgerItem> entity_ledger;
  std::vector<LedgerItem> relation_ledger;
  WeightScheme scheme;
  std::vector<std::string> warnings;
};

// Weighted P/R/F1 from weight totals, including the empty-side
// conventions: both totals 0 -> 1, exactly one total 0 -> 0.
F1Component weighted_f1(double matched_weight, double gt_weight,
                        double pred_weight);

// Both graphs must be normalized; throws kNotNormalized otherwise.
ScoreReport score(const ReportGraph& gt, const ReportGraph& pred,
                  const WeightScheme& scheme);

// Stable JSON document with schema_version.
std::string score_report_to_json(const ScoreReport& report,
                                 bool include_ledger = true);
// Fixed-width text table for terminals.
std::string score_report_to_text(const ScoreReport& report);

struct ConceptCount {
  std::string concept_id;
  int negated = 0;
  int present = 0;

  friend bool operator==(const ConceptCount&, const ConceptCount&) = default;
};

// Finding-concept occurrence counts over observation_absent (negated) and
// observation_present entities, sorted by negated count descending then
// concept id.
std::vector<ConceptCount> negation_counts(
    const std::vector<ReportGraph>& corpus);

inline constexpr double kDefaultTopKMultiplier = 5.0;

struct TopKScheme {
  WeightScheme scheme;
  std::vector<ConceptCount> ranking;  // the boosted concepts, in rank order
  std::vector<std::string> warnings;
};

// OBS-P base scheme with `multiplier` on the k most frequently negated
// finding concepts (applied to observation_present entities). Requires a
// non-empty corpus, k >= 1 and multiplier >= 1; fewer than k negated
// concepts yields all of them plus a CorpusTooSmall warning.
TopKScheme top_k_scheme(const std::vector<ReportGraph>& corpus, int k,
                        double multiplier = kDefaultTopKMultiplier);

}  // namespace headct

#endif  // HEADCT_ONE_SCORER_HPP_
