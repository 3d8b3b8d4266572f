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

#include "headct_one/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "headct_one/error.hpp"
#include "headct_one/text.hpp"
#include "json.hpp"

namespace headct {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kNormalNormal = "normal-normal";
constexpr std::string_view kNormalAbnormal = "normal-abnormal";
constexpr std::string_view kRephrased = "rephrased";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

bool is_valid_report_label(std::string_view label) {
  if (label == "normal" || label == "abnormal" || label == kRephrased) return true;
  return label.starts_with("error:") && label.size() > 6;
}

const ReportGraph* Corpus::find(std::string_view report_id) const {
  for (const ReportGraph& g : graphs) {
    if (g.report_id == report_id) return &g;
  }
  return nullptr;
}

void Corpus::validate() const {
  std::set<std::string> ids;
  for (const ReportGraph& g : graphs) {
    if (!ids.insert(g.report_id).second) {
      throw Error(ErrorCode::kSchema, "duplicate report_id \"" + g.report_id + "\"",
                  id);
    }
  }
  for (const auto& [rid, label] : labels) {
    if (!ids.count(rid)) {
      throw Error(ErrorCode::kSchema, "label for unknown report \"" + rid + "\"", id);
    }
    if (!is_valid_report_label(label)) {
      throw Error(ErrorCode::kSchema, "invalid label \"" + label + "\"", id + ":" + rid);
    }
  }
  for (const auto& [variant, original] : variant_of) {
    if (!ids.count(variant) || !ids.count(original)) {
      throw Error(ErrorCode::kSchema,
                  "variant link " + variant + " -> " + original + " does not resolve",
                  id);
    }
    if (variant == original) {
      throw Error(ErrorCode::kSchema, "report is its own variant", id + ":" + variant);
    }
  }
}

Corpus load_corpus(const std::string& manifest_path, LoadMode mode) {
  json root;
  try {
    root = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, e.what(), manifest_path);
  }
  auto fail = [&](const std::string& msg, const std::string& where) {
    throw Error(ErrorCode::kSchema, msg, manifest_path + ":" + where);
  };
  if (!root.is_object()) fail("manifest must be an object", "$");
  if (!root.contains("reports") || !root["reports"].is_array()) {
    fail("manifest needs a reports array", "$");
  }
  Corpus corpus;
  corpus.id = root.value("id", fs::path(manifest_path).stem().string());
  const fs::path base = fs::path(manifest_path).parent_path();
  const json& reports = root["reports"];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const json& r = reports[i];
    const std::string where = "reports[" + std::to_string(i) + "]";
    if (!r.is_object() || !r.contains("file") || !r["file"].is_string()) {
      fail("report entry needs a file", where);
    }
    const fs::path file = base / r["file"].get<std::string>();
    ReportGraph g = load_graph_file(file.string(), mode).graph;
    if (r.contains("label")) {
      if (!r["label"].is_string()) fail("label must be a string", where);
      corpus.labels[g.report_id] = r["label"].get<std::string>();
    }
    if (r.contains("variant_of")) {
      if (!r["variant_of"].is_string()) fail("variant_of must be a string", where);
      corpus.variant_of[g.report_id] = r["variant_of"].get<std::string>();
    }
    corpus.graphs.push_back(std::move(g));
  }
  corpus.validate();
  return corpus;
}

Corpus load_corpus_dir(const std::string& dir, LoadMode mode) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  Corpus corpus;
  corpus.id = fs::path(dir).filename().string();
  for (const fs::path& f : files) {
    corpus.graphs.push_back(load_graph_file(f.string(), mode).graph);
  }
  corpus.validate();
  return corpus;
}

const Aggregate* ExperimentResult::find_aggregate(std::string_view name) const {
  for (const Aggregate& a : aggregates) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

double ExperimentResult::aggregate(std::string_view name) const {
  const Aggregate* a = find_aggregate(name);
  if (!a) throw Error(ErrorCode::kSchema, "no aggregate \"" + std::string(name) + "\"");
  return a->value;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t t = 0; t < count; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  // Lowest failing index wins so errors are deterministic.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string report_site(const ReportGraph& graph) {
  auto it = graph.meta.find("site");
  return it == graph.meta.end() ? graph.report_id : it->second;
}

std::vector<Aggregate> compute_aggregates(std::string_view kind,
                                          const std::vector<PairScore>& pairs,
                                          const std::vector<WeightScheme>& schemes) {
  std::vector<Aggregate> out;
  if (kind == "normal-abnormal") {
    std::vector<std::string> sites;
    std::map<std::string, std::vector<double>> nn, na;
    for (const PairScore& p : pairs) {
      if (std::find(sites.begin(), sites.end(), p.group) == sites.end()) {
        sites.push_back(p.group);
      }
      (p.condition == kNormalNormal ? nn : na)[p.group].push_back(p.headct_one);
    }
    std::vector<double> normals, abnormals, deltas;
    for (const std::string& s : sites) {
      const bool has_nn = nn.count(s) > 0;
      const bool has_na = na.count(s) > 0;
      double n = 0.0, a = 0.0;
      if (has_nn) {
        n = mean_of(nn[s]);
        out.push_back({"site/" + s + "/normal", n});
        normals.push_back(n);
      }
      if (has_na) {
        a = mean_of(na[s]);
        out.push_back({"site/" + s + "/normal_abnormal", a});
        abnormals.push_back(a);
      }
      if (has_nn && has_na) {
        out.push_back({"site/" + s + "/delta", n - a});
        deltas.push_back(n - a);
      }
    }
    if (!normals.empty()) out.push_back({"normal", mean_of(normals)});
    if (!abnormals.empty()) out.push_back({"normal_abnormal", mean_of(abnormals)});
    if (!deltas.empty()) out.push_back({"delta", mean_of(deltas)});
    return out;
  }
  if (kind == "deltas") {
    for (const WeightScheme& scheme : schemes) {
      std::map<std::string, std::vector<double>> by_kind;
      for (const PairScore& p : pairs) {
        if (p.scheme == scheme.name) by_kind[p.condition].push_back(p.headct_one);
      }
      std::map<std::string, double> means;
      for (const auto& [k, values] : by_kind) {
        means[k] = mean_of(values);
        out.push_back({scheme.name + "/mean/" + k, means[k]});
      }
      auto reph = means.find(std::string(kRephrased));
      if (reph == means.end()) continue;
      for (const auto& [k, m] : means) {
        if (k == kRephrased) continue;
        out.push_back({scheme.name + "/delta/" + k, reph->second - m});
      }
    }
    return out;
  }
  throw Error(ErrorCode::kSchema, "unknown experiment kind \"" + std::string(kind) + "\"");
}

ExperimentResult run_normal_abnormal(const Corpus& corpus, const WeightScheme& scheme,
                                     int jobs) {
  std::vector<const ReportGraph*> normals, abnormals;
  for (const ReportGraph& g : corpus.graphs) {
    auto it = corpus.labels.find(g.report_id);
    if (it == corpus.labels.end()) continue;
    if (it->second == "normal") normals.push_back(&g);
    if (it->second == "abnormal") abnormals.push_back(&g);
  }
  if (normals.size() < 2 || abnormals.empty()) {
    throw Error(ErrorCode::kInsufficientCorpus,
                "need at least 2 normal and 1 abnormal report, have " +
                    std::to_string(normals.size()) + " and " +
                    std::to_string(abnormals.size()),
                corpus.id);
  }
  struct Job {
    const ReportGraph* gt;
    const ReportGraph* pred;
    std::string_view condition;
  };
  std::vector<Job> work;
  for (const ReportGraph* n : normals) {
    for (const ReportGraph* m : normals) {
      if (m != n && report_site(*m) != report_site(*n)) {
        work.push_back({n, m, kNormalNormal});
      }
    }
  }
  if (work.empty()) {
    throw Error(ErrorCode::kInsufficientCorpus,
                "normal reports must come from at least two sites", corpus.id);
  }
  for (const ReportGraph* n : normals) {
    for (const ReportGraph* a : abnormals) {
      if (report_site(*a) != report_site(*n)) work.push_back({n, a, kNormalAbnormal});
    }
  }
  ExperimentResult result;
  result.kind = "normal-abnormal";
  result.corpus_id = corpus.id;
  result.schemes = {scheme};
  result.pairs.resize(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const Job& job = work[i];
    ScoreReport r = score(*job.gt, *job.pred, scheme);
    result.pairs[i] = {scheme.name, std::string(job.condition), job.gt->report_id,
                       job.pred->report_id, report_site(*job.gt), r.headct_one,
                       r.entity.f1, r.relation.f1};
  });
  result.aggregates = compute_aggregates(result.kind, result.pairs, result.schemes);
  for (const ReportGraph* n : normals) {
    if (!result.find_aggregate("site/" + report_site(*n) + "/delta")) {
      result.warnings.push_back("site " + report_site(*n) +
                                " lacks normal-normal or normal-abnormal pairs");
    }
  }
  return result;
}

ExperimentResult run_modification_deltas(const Corpus& corpus,
                                         const std::vector<WeightScheme>& schemes,
                                         int jobs) {
  if (schemes.empty()) throw Error(ErrorCode::kConfig, "scheme list is empty", "schemes");
  std::set<std::string> names;
  for (const WeightScheme& s : schemes) {
    if (!names.insert(s.name).second) {
      throw Error(ErrorCode::kConfig, "duplicate scheme name \"" + s.name + "\"",
                  "schemes");
    }
  }
  ExperimentResult result;
  result.kind = "deltas";
  result.corpus_id = corpus.id;
  result.schemes = schemes;

  struct Variant {
    const ReportGraph* original;
    const ReportGraph* variant;
    std::string kind;
  };
  std::vector<Variant> variants;
  std::set<std::string> kinds;
  std::map<std::string, std::set<std::string>> kinds_by_original;
  for (const ReportGraph& g : corpus.graphs) {
    auto link = corpus.variant_of.find(g.report_id);
    if (link == corpus.variant_of.end()) continue;
    auto label = corpus.labels.find(g.report_id);
    if (label == corpus.labels.end() ||
        (label->second != kRephrased && !label->second.starts_with("error:"))) {
      result.warnings.push_back("variant " + g.report_id +
                                " has no rephrased/error label; skipped");
      continue;
    }
    variants.push_back({corpus.find(link->second), &g, label->second});
    kinds.insert(label->second);
    kinds_by_original[link->second].insert(label->second);
  }
  std::set<std::string> variant_ids;
  for (const auto& [v, _] : corpus.variant_of) variant_ids.insert(v);
  for (const ReportGraph& g : corpus.graphs) {
    if (variant_ids.count(g.report_id)) continue;
    auto it = kinds_by_original.find(g.report_id);
    if (it == kinds_by_original.end()) {
      result.warnings.push_back("original " + g.report_id + " has no variants");
      continue;
    }
    for (const std::string& k : kinds) {
      if (!it->second.count(k)) {
        result.warnings.push_back("original " + g.report_id + " lacks a " + k +
                                  " variant");
      }
    }
  }

  const std::size_t per_scheme = variants.size();
  result.pairs.resize(per_scheme * schemes.size());
  parallel_for(result.pairs.size(), jobs, [&](std::size_t i) {
    const WeightScheme& scheme = schemes[i / per_scheme];
    const Variant& v = variants[i % per_scheme];
    ScoreReport r = score(*v.original, *v.variant, scheme);
    result.pairs[i] = {scheme.name, v.kind, v.original->report_id,
                       v.variant->report_id, v.original->report_id, r.headct_one,
                       r.entity.f1, r.relation.f1};
  });
  result.aggregates = compute_aggregates(result.kind, result.pairs, result.schemes);
  return result;
}

std::string experiment_to_json(const ExperimentResult& result,
                               std::optional<std::string> timestamp) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = result.kind;
  j["corpus_id"] = result.corpus_id;
  if (timestamp) j["generated_at"] = *timestamp;
  ordered_json schemes = ordered_json::array();
  for (const WeightScheme& s : result.schemes) {
    schemes.push_back(ordered_json::parse(scheme_to_json(s)));
  }
  j["schemes"] = std::move(schemes);
  ordered_json pairs = ordered_json::array();
  for (const PairScore& p : result.pairs) {
    ordered_json jp;
    jp["scheme"] = p.scheme;
    jp["condition"] = p.condition;
    jp["gt_id"] = p.gt_id;
    jp["pred_id"] = p.pred_id;
    jp["group"] = p.group;
    jp["headct_one"] = p.headct_one;
    jp["entity_f1"] = p.entity_f1;
    jp["relation_f1"] = p.relation_f1;
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  ordered_json aggs = ordered_json::array();
  for (const Aggregate& a : result.aggregates) {
    ordered_json ja;
    ja["name"] = a.name;
    ja["value"] = a.value;
    aggs.push_back(std::move(ja));
  }
  j["aggregates"] = std::move(aggs);
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

ExperimentResult experiment_from_json(std::string_view document) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, e.what());
  }
  auto fail = [](const std::string& msg, const std::string& path) {
    throw Error(ErrorCode::kSchema, msg, path);
  };
  if (!j.is_object()) fail("experiment result must be an object", "$");
  for (const char* key : {"kind", "schemes", "pairs", "aggregates"}) {
    if (!j.contains(key)) fail(std::string("missing \"") + key + "\"", "$");
  }
  ExperimentResult r;
  try {
    r.kind = j["kind"].get<std::string>();
    r.corpus_id = j.value("corpus_id", "");
    for (const json& s : j["schemes"]) r.schemes.push_back(scheme_from_json(s.dump()));
    for (const json& p : j["pairs"]) {
      r.pairs.push_back({p.at("scheme").get<std::string>(),
                         p.at("condition").get<std::string>(),
                         p.at("gt_id").get<std::string>(),
                         p.at("pred_id").get<std::string>(),
                         p.at("group").get<std::string>(),
                         p.at("headct_one").get<double>(),
                         p.at("entity_f1").get<double>(),
                         p.at("relation_f1").get<double>()});
    }
    for (const json& a : j["aggregates"]) {
      r.aggregates.push_back({a.at("name").get<std::string>(), a.at("value").get<double>()});
    }
    if (j.contains("warnings")) {
      r.warnings = j["warnings"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    fail(e.what(), "$");
  }
  const auto expected = compute_aggregates(r.kind, r.pairs, r.schemes);
  if (expected != r.aggregates) {
    fail("stored aggregates differ from recomputation over per-pair scores",
         "aggregates");
  }
  return r;
}

std::string pairs_to_csv(const ExperimentResult& result) {
  std::string out =
      "experiment,scheme,condition,gt_id,pred_id,group,headct_one,entity_f1,"
      "relation_f1\n";
  for (const PairScore& p : result.pairs) {
    out += csv_field(result.kind) + "," + csv_field(p.scheme) + "," +
           csv_field(p.condition) + "," + csv_field(p.gt_id) + "," +
           csv_field(p.pred_id) + "," + csv_field(p.group) + "," +
           text::format_double(p.headct_one) + "," +
           text::format_double(p.entity_f1) + "," +
           text::format_double(p.relation_f1) + "\n";
  }
  return out;
}

std::string aggregates_to_csv(const ExperimentResult& result) {
  std::string out = "experiment,name,value\n";
  for (const Aggregate& a : result.aggregates) {
    out += csv_field(result.kind) + "," + csv_field(a.name) + "," +
           text::format_double(a.value) + "\n";
  }
  return out;
}

std::string negation_counts_to_csv(const std::vector<ConceptCount>& counts) {
  std::string out = "concept_id,negated_count,present_count\n";
  for (const ConceptCount& c : counts) {
    out += csv_field(c.concept_id) + "," + std::to_string(c.negated) + "," +
           std::to_string(c.present) + "\n";
  }
  return out;
}

}  // namespace headct
