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

#include "headct_one/api.hpp"

#include "headct_one/error.hpp"
#include "headct_one/graph.hpp"
#include "headct_one/normalizer.hpp"
#include "headct_one/ontology.hpp"
#include "headct_one/scorer.hpp"
#include "json.hpp"

namespace headct::api {

using ordered_json = nlohmann::ordered_json;

std::string score_documents(std::string_view gt_document, std::string_view pred_document,
                            std::string_view scheme_document, bool auto_normalize) {
  ReportGraph gt = load_graph(gt_document, LoadMode::kLenient).graph;
  ReportGraph pred = load_graph(pred_document, LoadMode::kLenient).graph;
  if (auto_normalize) {
    const NormalizationConfig config;
    gt = normalize_graph(gt, builtin_ontologies(), config);
    pred = normalize_graph(pred, builtin_ontologies(), config);
  }
  const WeightScheme scheme =
      scheme_document.empty() ? unit_scheme() : scheme_from_json(scheme_document);
  return score_report_to_json(score(gt, pred, scheme));
}

std::string normalize_document(std::string_view graph_document,
                               std::string_view config_document) {
  const ReportGraph graph = load_graph(graph_document, LoadMode::kLenient).graph;
  const NormalizationConfig config = config_document.empty()
                                         ? NormalizationConfig{}
                                         : load_normalization_config(config_document);
  return save_graph(normalize_graph(graph, builtin_ontologies(), config));
}

std::string top_k_scheme_document(std::string_view corpus_document, int k,
                                  double multiplier) {
  nlohmann::json docs;
  try {
    docs = nlohmann::json::parse(corpus_document);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, e.what());
  }
  if (!docs.is_array()) throw Error(ErrorCode::kSchema, "corpus must be an array", "$");
  std::vector<ReportGraph> corpus;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    try {
      corpus.push_back(load_graph(docs[i].dump(), LoadMode::kLenient).graph);
    } catch (const Error& e) {
      const std::string at = "[" + std::to_string(i) + "]";
      throw Error(e.code(), e.message(),
                  e.path().empty() || e.path() == "$" ? at : at + "." + e.path());
    }
  }
  const TopKScheme result = top_k_scheme(corpus, k, multiplier);
  ordered_json out;
  out["scheme"] = ordered_json::parse(scheme_to_json(result.scheme));
  ordered_json ranking = ordered_json::array();
  for (const ConceptCount& c : result.ranking) {
    ranking.push_back({{"concept_id", c.concept_id},
                       {"negated_count", c.negated},
                       {"present_count", c.present}});
  }
  out["ranking"] = std::move(ranking);
  out["warnings"] = result.warnings;
  return out.dump(2) + "\n";
}

std::string builtin_ontologies_document() {
  const OntologySet& set = builtin_ontologies();
  ordered_json out;
  out["finding"] = ordered_json::parse(ontology_to_json(set.finding, set.provenance));
  out["descriptor"] =
      ordered_json::parse(ontology_to_json(set.descriptor, set.provenance));
  out["anatomy"] = ordered_json::parse(ontology_to_json(set.anatomy, set.provenance));
  return out.dump(2) + "\n";
}

}  // namespace headct::api
