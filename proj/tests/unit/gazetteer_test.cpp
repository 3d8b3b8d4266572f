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

#include "headct_one/gazetteer.hpp"

#include <gtest/gtest.h>

#include "headct_one/normalizer.hpp"

namespace headct {
namespace {

const OntologySet& onts() { return builtin_ontologies(); }

TEST(Gazetteer, LongestMatchWithSpans) {
  const ReportGraph g = gazetteer_extract("Chronic infarct in the left frontal lobe.", onts(), "r");
  EXPECT_EQ(g.report_id, "r");
  ASSERT_EQ(g.entities.size(), 3u);
  EXPECT_EQ(g.entities[0].text, "Chronic");
  EXPECT_EQ(g.entities[0].label, EntityLabel::kDescriptor);
  EXPECT_EQ(g.entities[0].span, (Span{0, 1}));
  EXPECT_EQ(g.entities[1].text, "infarct");
  EXPECT_EQ(g.entities[1].label, EntityLabel::kObservationPresent);
  EXPECT_EQ(g.entities[2].text, "left frontal lobe");
  EXPECT_EQ(g.entities[2].label, EntityLabel::kAnatomy);
  EXPECT_EQ(g.entities[2].span, (Span{4, 7}));
  EXPECT_TRUE(g.relations.empty());
}

TEST(Gazetteer, NegationWindow) {
  ReportGraph g = gazetteer_extract("No evidence of hemorrhage.", onts());
  ASSERT_EQ(g.entities.size(), 1u);
  EXPECT_EQ(g.entities[0].label, EntityLabel::kObservationAbsent);

  g = gazetteer_extract("No evidence of one two three four five six hemorrhage", onts());
  ASSERT_EQ(g.entities.size(), 1u);
  EXPECT_EQ(g.entities[0].label, EntityLabel::kObservationPresent);
}

TEST(Gazetteer, EmptyAndUnknownText) {
  EXPECT_TRUE(gazetteer_extract("", onts()).entities.empty());
  EXPECT_TRUE(gazetteer_extract("lorem ipsum dolor", onts()).entities.empty());
}

TEST(Gazetteer, OutputNormalizesToExactMatches) {
  const ReportGraph g = gazetteer_extract(
      "Acute subdural hematoma along the right frontal lobe with midline shift. "
      "No hydrocephalus.",
      onts());
  std::vector<NormalizationOutcome> outcomes;
  const Normalizer n(onts(), {});
  const ReportGraph out = n.normalize_graph(g, &outcomes);
  EXPECT_FALSE(outcomes.empty());
  for (const NormalizationOutcome& o : outcomes) {
    EXPECT_EQ(o.method, NormalizationMethod::kExact) << o.entity_id;
  }
  EXPECT_TRUE(validate_graph(out, LoadMode::kStrict).empty());
}

}  // namespace
}  // namespace headct
