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

#ifndef HEADCT_ONE_HARNESS_HPP_
#define HEADCT_ONE_HARNESS_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "headct_one/graph.hpp"
#include "headct_one/scorer.hpp"

namespace headct {

inline constexpr int kSchemaVersion = 1;

// Report labels: "normal", "abnormal", "rephrased", "error:<kind>".
bool is_valid_report_label(std::string_view label);

struct Corpus {
  std::string id;
  std::vector<ReportGraph> graphs;
  std::map<std::string, std::string> labels;      // report_id -> label
  std::map<std::string, std::string> variant_of;  // variant -> original id

  const ReportGraph* find(std::string_view report_id) const;
  // Throws kSchema on duplicate ids, dangling label/variant keys or
  // unknown label strings.
  void validate() const;
};

// Manifest: {"schema_version": 1, "id": ..., "reports": [{"file": ...,
// "label"?: ..., "variant_of"?: ...}]}. Paths are relative to the manifest.
Corpus load_corpus(const std::string& manifest_path, LoadMode mode);
// Every *.json file in the directory, sorted by name, unlabeled.
Corpus load_corpus_dir(const std::string& dir, LoadMode mode);

struct PairScore {
  std::string scheme;
  std::string condition;  // normal-normal, normal-abnormal, or variant label
  std::string gt_id;
  std::string pred_id;
  std::string group;  // site (normal-abnormal) or original id (deltas)
  double headct_one = 0.0;
  double entity_f1 = 0.0;
  double relation_f1 = 0.0;

  friend bool operator==(const PairScore&, const PairScore&) = default;
};

struct Aggregate {
  std::string name;
  double value = 0.0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct ExperimentResult {
  std::string kind;  // "normal-abnormal" or "deltas"
  std::string corpus_id;
  std::vector<WeightScheme> schemes;
  std::vector<PairScore> pairs;
  std::vector<Aggregate> aggregates;
  std::vector<std::string> warnings;

  const Aggregate* find_aggregate(std::string_view name) const;
  double aggregate(std::string_view name) const;  // throws if absent
};

// Aggregates are a pure function of (kind, pairs, scheme order).
std::vector<Aggregate> compute_aggregates(std::string_view kind,
                                          const std::vector<PairScore>& pairs,
                                          const std::vector<WeightScheme>&
                                              schemes);

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep index
// order.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn);

// Site of a report: meta["site"] when present, else the report id.
std::string report_site(const ReportGraph& graph);

// Normal-normal pairs (gt normal, pred normal from another site) and
// normal-abnormal pairs (gt normal, pred abnormal from another site).
// Aggregates per site: site/<s>/normal, site/<s>/normal_abnormal,
// site/<s>/delta (normal minus normal_abnormal); overall means: normal,
// normal_abnormal, delta. Throws kInsufficientCorpus unless there are at
// least two normal reports on two sites and one abnormal report.
ExperimentResult run_normal_abnormal(const Corpus& corpus,
                                     const WeightScheme& scheme, int jobs = 1);

// For each scheme and variant kind, the mean score(original, variant)
// (aggregate "<scheme>/mean/<kind>") and the rephrased-minus-kind delta
// ("<scheme>/delta/<kind>") for every non-rephrased kind.
ExperimentResult run_modification_deltas(
    const Corpus& corpus, const std::vector<WeightScheme>& schemes,
    int jobs = 1);

std::string experiment_to_json(const ExperimentResult& result,
                               std::optional<std::string> timestamp = {});
// Recomputes aggregates and throws kSchema when they differ from the stored
// ones.
ExperimentResult experiment_from_json(std::string_view document);

// Columns: experiment,scheme,condition,gt_id,pred_id,group,headct_one,
// entity_f1,relation_f1
std::string pairs_to_csv(const ExperimentResult& result);
// Columns: experiment,name,value
std::string aggregates_to_csv(const ExperimentResult& result);
// Columns: concept_id,negated_count,present_count
std::string negation_counts_to_csv(const std::vector<ConceptCount>& counts);

}  // namespace headct

#endif  // HEADCT_ONE_HARNESS_HPP_
