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

#include <gtest/gtest.h>

#include <atomic>

#include "headct_one/error.hpp"
#include "test_support.hpp"

namespace headct {
namespace {

const OntologySet& onts() { return builtin_ontologies(); }

Entity ent(std::string text, EntityLabel label, std::string id = "e1") {
  return Entity{std::move(id), std::move(text), label, std::nullopt, {}};
}

std::vector<std::string> ids(const NormalizationOutcome& o) {
  std::vector<std::string> out;
  for (const auto& c : o.concepts) out.push_back(c.concept_id);
  return out;
}

class FakeClassifier : public DescriptorClassifier {
 public:
  explicit FakeClassifier(std::optional<std::string> answer, bool fail = false)
      : answer_(std::move(answer)), fail_(fail) {}
  std::optional<std::string> classify(std::string_view) override {
    ++calls;
    if (fail_) throw Error(ErrorCode::kClassifierUnavailable, "connection refused");
    return answer_;
  }
  std::atomic<int> calls{0};

 private:
  std::optional<std::string> answer_;
  bool fail_;
};

TEST(NormalizeEntity, SplitFrontoparietal) {
  const auto o = normalize_entity(ent("frontoparietal", EntityLabel::kAnatomy), onts(), {});
  EXPECT_EQ(o.method, NormalizationMethod::kSplit);
  EXPECT_EQ(ids(o), (std::vector<std::string>{"frontal", "parietal"}));
  for (const auto& c : o.concepts) {
    EXPECT_EQ(c.ontology, OntologyKind::kAnatomy);
    EXPECT_EQ(c.similarity, 1.0);
  }
  EXPECT_EQ(o.component_texts, (std::vector<std::string>{"frontal", "parietal"}));
}

TEST(NormalizeEntity, SplitInsidePhraseAndChained) {
  auto o = normalize_entity(ent("Frontoparietal lobe", EntityLabel::kAnatomy), onts(), {});
  EXPECT_EQ(ids(o), (std::vector<std::string>{"frontal_lobe", "parietal_lobe"}));
  o = normalize_entity(ent("fronto-temporo-parietal", EntityLabel::kAnatomy), onts(), {});
  EXPECT_EQ(o.method, NormalizationMethod::kSplit);
  EXPECT_EQ(ids(o), (std::vector<std::string>{"frontal", "temporal", "parietal"}));
}

TEST(NormalizeEntity, SplitOnlyForAnatomy) {
  const auto o = normalize_entity(ent("frontoparietal", EntityLabel::kObservationPresent),
                                  onts(), {});
  EXPECT_EQ(o.method, NormalizationMethod::kSimilarity);
  EXPECT_EQ(o.concepts.size(), 1u);
}

TEST(NormalizeEntity, ExactSynonym) {
  const auto o = normalize_entity(ent("clot", EntityLabel::kObservationPresent), onts(), {});
  EXPECT_EQ(o.method, NormalizationMethod::kExact);
  ASSERT_EQ(o.concepts.size(), 1u);
  EXPECT_EQ(o.concepts[0], (ConceptRef{OntologyKind::kFinding, "thrombosis", 1.0}));
}

TEST(NormalizeEntity, DevicesAndProceduresUseFindingTable) {
  auto o = normalize_entity(ent("VP shunt", EntityLabel::kDevicePresent), onts(), {});
  EXPECT_EQ(ids(o), (std::vector<std::string>{"ventriculoperitoneal_shunt"}));
  o = normalize_entity(ent("craniotomy", EntityLabel::kProcedure), onts(), {});
  EXPECT_EQ(ids(o), (std::vector<std::string>{"craniotomy"}));
}

// Expected ranking from tests/oracles/similarity_argmax.py over the exported
// finding table.
TEST(NormalizeEntity, TypoFallsBackToSimilarityArgmax) {
  const auto o = normalize_entity(ent("thrombossis", EntityLabel::kObservationPresent), onts(), {});
  EXPECT_EQ(o.method, NormalizationMethod::kSimilarity);
  ASSERT_EQ(o.concepts.size(), 1u);
  EXPECT_EQ(o.concepts[0].concept_id, "thrombosis");
  EXPECT_NEAR(o.concepts[0].similarity, 0.88, 1e-12);
  const std::vector<Candidate> expected = {{"thrombosis", 0.88},
                                           {"venous_thrombosis", 0.5625},
                                           {"agenesis", 0.2608695652173913},
                                           {"necrosis", 0.2608695652173913},
                                           {"arthritis", 0.25}};
  ASSERT_EQ(o.candidates.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(o.candidates[i].concept_id, expected[i].concept_id);
    EXPECT_NEAR(o.candidates[i].similarity, expected[i].similarity, 1e-12);
  }
}

TEST(NormalizeEntity, SimilarityInvariantUnderCaseAndTrailingPunctuation) {
  const auto base = normalize_entity(ent("subdural hematoma", EntityLabel::kObservationPresent),
                                     onts(), {});
  for (const char* v : {"Subdural Hematoma.", "SUBDURAL HEMATOMA;", "subdural hematoma!?"}) {
    const auto o = normalize_entity(ent(v, EntityLabel::kObservationPresent), onts(), {});
    EXPECT_EQ(o.concepts, base.concepts) << v;
    EXPECT_EQ(o.method, base.method);
  }
}

TEST(NormalizeEntity, LateralityStripAndRetry) {
  const auto o = normalize_entity(ent("right hematoma", EntityLabel::kObservationPresent),
                                  onts(), {});
  EXPECT_EQ(o.method, NormalizationMethod::kExact);
  EXPECT_EQ(ids(o), (std::vector<std::string>{"hemorrhage"}));
  EXPECT_EQ(o.stripped, (std::vector<std::string>{"right"}));

  const auto sided = normalize_entity(ent("left thalamus", EntityLabel::kAnatomy), onts(), {});
  EXPECT_EQ(ids(sided), (std::vector<std::string>{"left_thalamus"}));
  EXPECT_TRUE(sided.stripped.empty());

  const auto both = normalize_entity(ent("bilateral thalamus", EntityLabel::kAnatomy), onts(), {});
  EXPECT_EQ(ids(both), (std::vector<std::string>{"thalamus"}));
  EXPECT_EQ(both.stripped, (std::vector<std::string>{"bilateral"}));
}

TEST(NormalizeEntity, UnmatchedThreshold) {
  NormalizationConfig cfg;
  cfg.unmatched_threshold = 0.9;
  const auto o = normalize_entity(ent("thrombossis", EntityLabel::kObservationPresent), onts(), cfg);
  EXPECT_EQ(o.method, NormalizationMethod::kUnmatched);
  EXPECT_TRUE(o.concepts.empty());
  EXPECT_FALSE(o.candidates.empty());
  cfg.unmatched_threshold = 0.88;
  EXPECT_EQ(normalize_entity(ent("thrombossis", EntityLabel::kObservationPresent), onts(), cfg).method,
            NormalizationMethod::kSimilarity);
}

TEST(NormalizeEntity, ZeroThresholdAlwaysAssigns) {
  for (const char* s : {"zzz", "q", "!!!x", "completely unrelated words"}) {
    for (EntityLabel l : kAllEntityLabels) {
      const auto o = l == EntityLabel::kDescriptor ? normalize_descriptor(ent(s, l), onts(), {})
                                                   : normalize_entity(ent(s, l), onts(), {});
      EXPECT_FALSE(o.concepts.empty()) << s;
    }
  }
}

TEST(NormalizeDescriptor, LexiconExamples) {
  auto check = [](const char* text, const char* expected) {
    const auto o = normalize_descriptor(ent(text, EntityLabel::kDescriptor), onts(), {});
    EXPECT_EQ(o.method, NormalizationMethod::kExact) << text;
    EXPECT_EQ(ids(o), (std::vector<std::string>{expected})) << text;
  };
  check("tiny", "size/qualitative/very_small");
  check("no evidence of", "certainty/definitely_absent");
  check("5 mm", "size/numeric");
  check("Acute", "temporality/acute");
}

TEST(NormalizeDescriptor, SimilarityOnlyAssignsLeaves) {
  const auto o = normalize_descriptor(ent("dense", EntityLabel::kDescriptor), onts(), {});
  EXPECT_EQ(o.method, NormalizationMethod::kSimilarity);
  EXPECT_EQ(ids(o), (std::vector<std::string>{"density/isodense"}));
}

TEST(NormalizeDescriptor, ClassifierConsultedOnlyOnLexiconMiss) {
  auto fake = std::make_shared<FakeClassifier>("size/numeric");
  auto o = normalize_descriptor(ent("tiny", EntityLabel::kDescriptor), onts(), {}, fake);
  EXPECT_EQ(o.method, NormalizationMethod::kExact);
  EXPECT_EQ(fake->calls, 0);
  o = normalize_descriptor(ent("3.6 x 2.7 cm", EntityLabel::kDescriptor), onts(), {}, fake);
  EXPECT_EQ(fake->calls, 1);
  EXPECT_EQ(o.method, NormalizationMethod::kClassifier);
  EXPECT_EQ(ids(o), (std::vector<std::string>{"size/numeric"}));
  EXPECT_GE(o.concepts[0].similarity, 0.0);
  EXPECT_LE(o.concepts[0].similarity, 1.0);
}

TEST(NormalizeDescriptor, UnknownCategoryFallsBackToSimilarity) {
  auto fake = std::make_shared<FakeClassifier>("size/enormous");
  const auto o = normalize_descriptor(ent("dense", EntityLabel::kDescriptor), onts(), {}, fake);
  EXPECT_EQ(o.method, NormalizationMethod::kSimilarity);
  EXPECT_EQ(ids(o), (std::vector<std::string>{"density/isodense"}));
  ASSERT_FALSE(o.notes.empty());
  EXPECT_NE(o.notes[0].find("size/enormous"), std::string::npos);
}

TEST(NormalizeDescriptor, ClassifierFailureIsNonFatal) {
  auto fake = std::make_shared<FakeClassifier>(std::nullopt, true);
  const auto o = normalize_descriptor(ent("dense", EntityLabel::kDescriptor), onts(), {}, fake);
  EXPECT_EQ(o.method, NormalizationMethod::kSimilarity);
  ASSERT_FALSE(o.notes.empty());
  EXPECT_NE(o.notes[0].find("ClassifierUnavailable"), std::string::npos);
}

TEST(NormalizeDescriptor, DeclineFallsBack) {
  auto fake = std::make_shared<FakeClassifier>(std::nullopt);
  const auto o = normalize_descriptor(ent("dense", EntityLabel::kDescriptor), onts(), {}, fake);
  EXPECT_EQ(o.method, NormalizationMethod::kSimilarity);
}

ReportGraph frontoparietal_graph() {
  ReportGraph g;
  g.report_id = "fp";
  g.entities = {ent("encephalomalacia", EntityLabel::kObservationPresent, "e1"),
                ent("frontoparietal", EntityLabel::kAnatomy, "e2"),
                ent("chronic", EntityLabel::kDescriptor, "e3")};
  g.entities[1].span = Span{3, 4};
  g.relations = {{"e1", RelationLabel::kLocatedAt, "e2"}, {"e3", RelationLabel::kModify, "e1"}};
  return g;
}

TEST(NormalizeGraph, SplitExpandsEntitiesAndRelations) {
  const ReportGraph out = normalize_graph(frontoparietal_graph(), onts(), {});
  ASSERT_EQ(out.entities.size(), 4u);
  int anatomy = 0;
  for (const Entity& e : out.entities) {
    ASSERT_FALSE(e.concepts.empty()) << e.id;
    if (e.label == EntityLabel::kAnatomy) {
      ++anatomy;
      EXPECT_EQ(e.concepts.size(), 1u);
      EXPECT_EQ(e.span, (Span{3, 4}));
    }
  }
  EXPECT_EQ(anatomy, 2);
  EXPECT_EQ(out.find_entity("e2#1")->concepts[0].concept_id, "frontal");
  EXPECT_EQ(out.find_entity("e2#2")->concepts[0].concept_id, "parietal");
  EXPECT_EQ(out.find_entity("e2#1")->text, "frontal");
  int located = 0;
  for (const Relation& r : out.relations) located += r.label == RelationLabel::kLocatedAt;
  EXPECT_EQ(located, 2);
  EXPECT_EQ(out.relations.size(), 3u);
  EXPECT_NO_THROW(validate_graph(out, LoadMode::kStrict));
  EXPECT_TRUE(is_normalized(out));
  EXPECT_TRUE(out.meta.count("normalization/e2"));
  EXPECT_EQ(outcome_from_json(out.meta.at("normalization/e2")).method, NormalizationMethod::kSplit);
}

TEST(NormalizeGraph, SplitMultipliesEveryIncidentRelation) {
  ReportGraph g = frontoparietal_graph();
  g.entities.push_back(ent("edema", EntityLabel::kObservationPresent, "e4"));
  g.relations.push_back({"e4", RelationLabel::kLocatedAt, "e2"});
  g.entities.push_back(ent("temporo-occipital", EntityLabel::kAnatomy, "e5"));
  g.relations.push_back({"e4", RelationLabel::kLocatedAt, "e5"});
  const ReportGraph out = normalize_graph(g, onts(), {});
  // e1->e2 (x2), e3->e1 (x1), e4->e2 (x2), e4->e5 (x2)
  EXPECT_EQ(out.relations.size(), 7u);
}

TEST(NormalizeGraph, IdempotentAndEmpty) {
  const ReportGraph once = normalize_graph(frontoparietal_graph(), onts(), {});
  EXPECT_EQ(normalize_graph(once, onts(), {}), once);
  ReportGraph empty;
  empty.report_id = "empty";
  EXPECT_EQ(normalize_graph(empty, onts(), {}), empty);
}

TEST(NormalizeGraph, UnmatchedEntitiesAreRecorded) {
  NormalizationConfig cfg;
  cfg.unmatched_threshold = 0.95;
  ReportGraph g;
  g.report_id = "u";
  g.entities = {ent("qqqq", EntityLabel::kObservationPresent)};
  const ReportGraph out = normalize_graph(g, onts(), cfg);
  EXPECT_TRUE(out.entities[0].concepts.empty());
  EXPECT_TRUE(is_marked_unmatched(out, "e1"));
  EXPECT_TRUE(is_normalized(out));
  EXPECT_FALSE(is_normalized(g));
  EXPECT_EQ(normalize_graph(out, onts(), cfg), out);
}

TEST(Config, DefaultsAndParsing) {
  const NormalizationConfig def;
  EXPECT_EQ(def.split_rules.size(), 6u);
  EXPECT_EQ(def.unmatched_threshold, 0.0);
  const auto cfg = load_normalization_config(
      R"({"split_rules":{"occipito":"occipital"},"laterality_tokens":["left"],"unmatched_threshold":0.4,"provider":"trigram"})");
  ASSERT_EQ(cfg.split_rules.size(), 1u);
  EXPECT_EQ(cfg.split_rules[0], (SplitRule{"occipito", "occipital"}));
  EXPECT_EQ(cfg.laterality_tokens, (std::vector<std::string>{"left"}));
  EXPECT_EQ(cfg.unmatched_threshold, 0.4);
  const auto arr = load_normalization_config(
      R"({"split_rules":[{"prefix":"fronto","concept":"frontal"}],"provider":"external","classifier_endpoint":"http://127.0.0.1:1/c"})");
  EXPECT_EQ(arr.provider, ProviderKind::kExternal);
}

TEST(Config, Errors) {
  auto code = [](const std::string& doc) {
    try {
      load_normalization_config(doc);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(R"({"unmatched_threshold":1.5})"), ErrorCode::kConfig);
  EXPECT_EQ(code(R"({"unmatched_threshold":-0.1})"), ErrorCode::kConfig);
  EXPECT_EQ(code(R"({"split_rules":{"Fronto":"frontal"}})"), ErrorCode::kConfig);
  EXPECT_EQ(code(R"({"split_rules":{"":"frontal"}})"), ErrorCode::kConfig);
  EXPECT_EQ(code(R"({"provider":"bert"})"), ErrorCode::kConfig);
  EXPECT_EQ(code(R"({"provider":"external"})"), ErrorCode::kConfig);
  EXPECT_EQ(code(R"({"surprise":1})"), ErrorCode::kConfig);
  EXPECT_EQ(code("{"), ErrorCode::kConfig);
  try {
    load_normalization_config_file("/nonexistent/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Outcome, JsonRoundTrip) {
  NormalizationOutcome o;
  o.entity_id = "e7";
  o.concepts = {{OntologyKind::kAnatomy, "frontal", 1.0}, {OntologyKind::kAnatomy, "parietal", 0.5}};
  o.method = NormalizationMethod::kSplit;
  o.candidates = {{"a", 0.25}};
  o.stripped = {"left"};
  o.component_texts = {"frontal", "parietal"};
  o.notes = {"n"};
  const NormalizationOutcome back = outcome_from_json(outcome_to_json(o));
  EXPECT_EQ(back.entity_id, o.entity_id);
  EXPECT_EQ(back.concepts, o.concepts);
  EXPECT_EQ(back.method, o.method);
  EXPECT_EQ(back.candidates, o.candidates);
  EXPECT_EQ(back.stripped, o.stripped);
  EXPECT_EQ(back.component_texts, o.component_texts);
  EXPECT_EQ(back.notes, o.notes);
}

TEST(NormalizerClass, CustomProvider) {
  struct Constant : SimilarityProvider {
    double similarity(std::string_view a, std::string_view b) const override {
      return a == b ? 1.0 : 0.5;
    }
    std::string name() const override { return "constant"; }
  };
  const Normalizer n(onts(), {}, std::make_shared<Constant>());
  const auto o = n.normalize_entity(ent("qqq", EntityLabel::kObservationPresent));
  EXPECT_EQ(o.method, NormalizationMethod::kSimilarity);
  // Every concept ties at 0.5, so the smallest id wins.
  std::string smallest = onts().finding.concepts().front().concept_id;
  for (const Concept& c : onts().finding.concepts()) smallest = std::min(smallest, c.concept_id);
  EXPECT_EQ(ids(o), (std::vector<std::string>{smallest}));
}

}  // namespace
}  // namespace headct
