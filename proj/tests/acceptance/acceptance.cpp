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

// Acceptance runner: one PASS/FAIL line per primary criterion. Exit status
// is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hand_fixtures.hpp"
#include "headct_one/harness.hpp"
#include "headct_one/normalizer.hpp"
#include "headct_one/ontology.hpp"
#include "headct_one/scorer.hpp"
#include "properties.hpp"
#include "test_support.hpp"

namespace {

using namespace headct;
using namespace headct::testing;
using Clock = std::chrono::steady_clock;

constexpr double kFixtureTolerance = 1e-12;
constexpr double kFixtureBudgetSeconds = 1.0;
constexpr int kOraclePairs = 1000;
constexpr double kOracleBudgetSeconds = 30.0;
constexpr int kPropertyCases = 500;
constexpr std::size_t kMinExtraFixtures = 10;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Corpus normalized_corpus(const std::string& manifest) {
  Corpus c = load_corpus(data_path(manifest), LoadMode::kStrict);
  for (ReportGraph& g : c.graphs) g = normalize_graph(g, builtin_ontologies(), {});
  return c;
}

ReportGraph normalized_graph(const std::string& rel) {
  return normalize_graph(load_data_graph(rel), builtin_ontologies(), {});
}

Verdict metric_fixtures() {
  const auto start = Clock::now();
  const auto fixtures = hand_fixtures();
  int wrong = 0;
  bool anchor = false;
  std::string first;
  for (const Fixture& f : fixtures) {
    const ScoreReport r = score(f.gt, f.pred, f.scheme);
    const double expected = (f.entity_f1 + f.relation_f1) / 2.0;
    const bool ok = std::abs(r.entity.f1 - f.entity_f1) <= kFixtureTolerance &&
                    std::abs(r.relation.f1 - f.relation_f1) <= kFixtureTolerance &&
                    std::abs(r.headct_one - expected) <= kFixtureTolerance;
    if (!ok && wrong++ == 0) first = f.name;
    if (std::string(f.name) == "infarct edema versus infarct hemorrhage") {
      anchor = ok && std::abs(r.entity.precision - 0.5) <= kFixtureTolerance &&
               std::abs(r.entity.recall - 0.5) <= kFixtureTolerance &&
               std::abs(r.headct_one - 0.75) <= kFixtureTolerance;
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = wrong == 0 && anchor && fixtures.size() >= kMinExtraFixtures + 1 &&
                    elapsed < kFixtureBudgetSeconds;
  return {pass, std::to_string(fixtures.size()) + " fixtures, " + std::to_string(wrong) +
                    " wrong" + (first.empty() ? "" : " (first: " + first + ")") +
                    ", 0.75 anchor " + (anchor ? "ok" : "wrong") + ", " + fmt(elapsed) + " s"};
}

Verdict oracle_equivalence() {
  const auto start = Clock::now();
  GraphGen gen(20240611);
  int mismatches = 0;
  for (int i = 0; i < kOraclePairs; ++i) {
    const ReportGraph gt = gen.graph("gt");
    const ReportGraph pred = gen.coin(0.7) ? gen.perturb(gt, "pred") : gen.graph("pred");
    const WeightScheme scheme = gen.coin(0.2) ? unit_scheme() : gen.scheme(true);
    const ScoreReport r = score(gt, pred, scheme);
    const OracleScore o = oracle_score(gt, pred, scheme);
    if (r.entity.precision != o.entity.precision || r.entity.recall != o.entity.recall ||
        r.relation.precision != o.relation.precision || r.relation.recall != o.relation.recall) {
      ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < kOracleBudgetSeconds,
          std::to_string(kOraclePairs) + " pairs, " + std::to_string(mismatches) +
              " mismatches, " + fmt(elapsed) + " s"};
}

Verdict phrasing_invariance() {
  const ReportGraph a = load_data_graph("phrasing_pair/a.json");
  const ReportGraph b = load_data_graph("phrasing_pair/b.json");
  const double normalized = score(normalize_graph(a, builtin_ontologies(), {}),
                                  normalize_graph(b, builtin_ontologies(), {}), unit_scheme())
                                .headct_one;
  const double raw = raw_surface_score(a, b);
  return {std::abs(normalized - 1.0) <= kFixtureTolerance && raw < 1.0,
          "normalized " + fmt(normalized) + ", raw surface " + fmt(raw)};
}

Verdict normal_pairs() {
  const ExperimentResult r =
      run_normal_abnormal(normalized_corpus("normal_abnormal/manifest.json"),
                          load_scheme_file(data_path("schemes/obs_p.json")));
  int nn = 0, nn_perfect = 0, na = 0, na_below = 0;
  for (const PairScore& p : r.pairs) {
    if (p.condition == "normal-normal") {
      ++nn;
      nn_perfect += p.headct_one == 1.0;
    } else {
      ++na;
      na_below += p.headct_one < 1.0;
    }
  }
  return {nn > 0 && na > 0 && nn == nn_perfect && na == na_below,
          std::to_string(nn_perfect) + "/" + std::to_string(nn) + " normal-normal at 1.0, " +
              std::to_string(na_below) + "/" + std::to_string(na) + " normal-abnormal below 1.0"};
}

Verdict case_study() {
  const ReportGraph r1 = normalized_graph("case_study/r1.json");
  const ReportGraph r2 = normalized_graph("case_study/r2.json");
  const ReportGraph r3 = normalized_graph("case_study/r3.json");
  const WeightScheme obs = load_scheme_file(data_path("schemes/obs_p.json"));
  const WeightScheme hem = load_scheme_file(data_path("schemes/hemorrhage_only.json"));
  const double o12 = score(r1, r2, obs).headct_one;
  const double o23 = score(r2, r3, obs).headct_one;
  const double h12 = score(r1, r2, hem).headct_one;
  const double h23 = score(r2, r3, hem).headct_one;
  return {o12 > o23 && h12 < h23 && h12 == 0.0,
          "obs-p " + fmt(o12) + " > " + fmt(o23) + ", hemorrhage-only " + fmt(h12) + " < " +
              fmt(h23)};
}

Verdict scheme_sensitivity() {
  const auto schemes = standard_schemes();
  const ExperimentResult r =
      run_modification_deltas(normalized_corpus("variants/manifest.json"), schemes);
  auto argmax = [&](const std::string& kind) {
    std::string best;
    double top = -INFINITY;
    for (const WeightScheme& s : schemes) {
      const double d = r.aggregate(s.name + "/delta/" + kind);
      if (d > top) top = d, best = s.name;
    }
    return std::make_pair(best, top);
  };
  const auto obs = argmax("error:observation");
  const auto ana = argmax("error:anatomy");
  return {obs.first == "1000" && ana.first == "0010",
          "largest observation-error delta " + obs.first + " (" + fmt(obs.second) +
              "), largest anatomy-error delta " + ana.first + " (" + fmt(ana.second) + ")"};
}

Verdict ontology_integrity() {
  const OntologySet& onts = builtin_ontologies();
  std::size_t diagnostics = 0;
  for (const ConceptTable* t : {&onts.finding, &onts.descriptor, &onts.anatomy}) {
    diagnostics += validate_ontology(*t).size();
  }
  int checked = 0, unresolved = 0;
  for (const auto& [cid, surface] : read_tsv(fixture_path("descriptor_synonyms.tsv"))) {
    auto it = reassigned_descriptor_examples().find({cid, surface});
    const std::string expected = it == reassigned_descriptor_examples().end() ? cid : it->second;
    ++checked;
    unresolved += lookup_synonym(onts.descriptor, surface) != expected;
  }
  for (const auto& [cid, surface] : read_tsv(fixture_path("finding_synonyms.tsv"))) {
    ++checked;
    unresolved += lookup_synonym(onts.finding, surface) != cid;
  }
  return {diagnostics == 0 && unresolved == 0 && checked > 0,
          std::to_string(diagnostics) + " diagnostics, " + std::to_string(checked - unresolved) +
              "/" + std::to_string(checked) + " synonyms resolve"};
}

Verdict invariant_suites() {
  const std::vector<std::pair<std::string, PropertyResult>> results = {
      {"idempotence", check_idempotent_normalization(101, kPropertyCases)},
      {"symmetry", check_symmetry(102, kPropertyCases)},
      {"identity", check_identity(103, kPropertyCases)},
      {"scale", check_scale_invariance(104, kPropertyCases)},
      {"monotone", check_monotone_sensitivity(105, kPropertyCases)},
  };
  bool pass = true;
  std::string detail;
  for (const auto& [name, r] : results) {
    pass = pass && r.ok() && r.cases >= kPropertyCases;
    if (!detail.empty()) detail += ", ";
    detail += name + " " + std::to_string(r.cases - r.failures) + "/" + std::to_string(r.cases);
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"metric-fixtures", metric_fixtures},
      {"oracle-equivalence", oracle_equivalence},
      {"phrasing-invariance", phrasing_invariance},
      {"normal-pair-scores", normal_pairs},
      {"case-study-ordering", case_study},
      {"scheme-sensitivity", scheme_sensitivity},
      {"ontology-integrity", ontology_integrity},
      {"invariant-suites", invariant_suites},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
