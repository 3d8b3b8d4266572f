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

#ifndef HEADCT_ONE_NORMALIZER_HPP_
#define HEADCT_ONE_NORMALIZER_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "headct_one/graph.hpp"
#include "headct_one/ontology.hpp"
#include "headct_one/similarity.hpp"

namespace headct {

// "fronto" + "parietal" -> "frontal", "parietal".
struct SplitRule {
  std::string prefix;
  std::string concept_name;

  friend bool operator==(const SplitRule&, const SplitRule&) = default;
};

std::vector<SplitRule> default_split_rules();

enum class ProviderKind { kTrigram, kExternal };

struct NormalizationConfig {
  std::vector<SplitRule> split_rules = default_split_rules();
  std::vector<std::string> laterality_tokens = {"left", "right", "bilateral"};
  // 0 disables the unmatched outcome.
  double unmatched_threshold = 0.0;
  // kExternal routes descriptor classification through the HTTP classifier
  // at classifier_endpoint; the similarity tier stays trigram-based.
  ProviderKind provider = ProviderKind::kTrigram;
  std::string classifier_endpoint;
  double classifier_timeout_seconds = 5.0;

  // Throws kConfig.
  void validate() const;
};

// JSON with keys split_rules ([{prefix, concept}] or {prefix: concept}),
// laterality_tokens, unmatched_threshold, provider, classifier_endpoint.
NormalizationConfig load_normalization_config(std::string_view document);
NormalizationConfig load_normalization_config_file(const std::string& path);

enum class NormalizationMethod {
  kExact,
  kSplit,
  kSimilarity,
  kClassifier,
  kUnmatched,
};

std::string_view to_string(NormalizationMethod method);
std::optional<NormalizationMethod> parse_normalization_method(
    std::string_view s);

struct Candidate {
  std::string concept_id;
  double similarity = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct NormalizationOutcome {
  std::string entity_id;
  std::vector<ConceptRef> concepts;
  NormalizationMethod method = NormalizationMethod::kExact;
  // Top-5 similarity candidates for the last similarity search performed.
  std::vector<Candidate> candidates;
  // Laterality tokens removed before a successful retry.
  std::vector<std::string> stripped;
  // Surface text per assigned concept (split products); one entry per
  // concept otherwise.
  std::vector<std::string> component_texts;
  std::vector<std::string> notes;
};

// Serialized form stored in graph meta under "normalization/<entity id>".
std::string outcome_to_json(const NormalizationOutcome& outcome);
NormalizationOutcome outcome_from_json(std::string_view document);
inline constexpr std::string_view kOutcomeMetaPrefix = "normalization/";

// Consulted when the descriptor lexicon has no exact entry. Returns a
// category path such as "size/qualitative/very_small", or nullopt when the
// classifier declines. Throws kClassifierUnavailable on transport failure.
// Implementations must be callable from multiple threads.
class DescriptorClassifier {
 public:
  virtual ~DescriptorClassifier() = default;
  virtual std::optional<std::string> classify(std::string_view text) = 0;
};

// One POST per term to `endpoint` with body {"text": ...}; expects
// {"category_path": ...} back.
class HttpDescriptorClassifier final : public DescriptorClassifier {
 public:
  explicit HttpDescriptorClassifier(std::string endpoint,
                                    double timeout_seconds = 5.0);
  std::optional<std::string> classify(std::string_view text) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  double timeout_seconds_;
};

class Normalizer {
 public:
  Normalizer(const OntologySet& ontologies, NormalizationConfig config,
             std::shared_ptr<const SimilarityProvider> provider = nullptr,
             std::shared_ptr<DescriptorClassifier> classifier = nullptr);

  NormalizationOutcome normalize_entity(const Entity& entity) const;
  NormalizationOutcome normalize_descriptor(const Entity& entity) const;

  // Entities that already carry concepts are left untouched, which makes
  // the operation idempotent. Split outcomes expand an entity into one
  // entity per concept and duplicate every incident relation.
  ReportGraph normalize_graph(
      const ReportGraph& graph,
      std::vector<NormalizationOutcome>* outcomes = nullptr) const;

  const NormalizationConfig& config() const { return config_; }

 private:
  struct Resolution;
  Resolution resolve(std::string_view text, const ConceptTable& table,
                     bool allow_split, int depth) const;
  Resolution similarity_tier(std::string_view text,
                             const ConceptTable& table) const;
  std::optional<std::vector<std::string>> split_text(
      std::string_view text, const ConceptTable& table) const;
  std::optional<std::vector<std::string>> split_token(
      std::string_view token, const ConceptTable& table, int depth) const;
  NormalizationOutcome finish(const Entity& entity, Resolution r,
                              const ConceptTable& table) const;

  const OntologySet* ontologies_;
  NormalizationConfig config_;
  std::shared_ptr<const SimilarityProvider> provider_;
  std::shared_ptr<DescriptorClassifier> classifier_;
};

// Convenience wrappers using the trigram provider and, when
// cfg.provider is kExternal, an HttpDescriptorClassifier.
NormalizationOutcome normalize_entity(const Entity& entity,
                                      const OntologySet& ontologies,
                                      const NormalizationConfig& config);
NormalizationOutcome normalize_descriptor(
    const Entity& entity, const OntologySet& ontologies,
    const NormalizationConfig& config,
    std::shared_ptr<DescriptorClassifier> classifier = nullptr);
ReportGraph normalize_graph(const ReportGraph& graph,
                            const OntologySet& ontologies,
                            const NormalizationConfig& config);

// True when every entity has concepts or is recorded as unmatched in meta.
bool is_normalized(const ReportGraph& graph);
bool is_marked_unmatched(const ReportGraph& graph, std::string_view entity_id);

}  // namespace headct

#endif  // HEADCT_ONE_NORMALIZER_HPP_
