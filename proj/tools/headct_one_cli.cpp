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

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "headct_one/error.hpp"
#include "headct_one/gazetteer.hpp"
#include "headct_one/graph.hpp"
#include "headct_one/harness.hpp"
#include "headct_one/normalizer.hpp"
#include "headct_one/ontology.hpp"
#include "headct_one/scorer.hpp"
#include "headct_one/text.hpp"

namespace fs = std::filesystem;
using namespace headct;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string ontology_dir;
  std::string anatomy_file;
  std::vector<std::string> anatomy_roots;
  int anatomy_depth = kDefaultAnatomyDepth;
  int jobs = 1;
  bool strict = false;
  bool timestamp = false;
  bool auto_normalize = false;

  LoadMode load_mode() const { return strict ? LoadMode::kStrict : LoadMode::kLenient; }
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path);
  out << content;
}

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

void warn_all(const std::vector<std::string>& messages, const std::string& where = {}) {
  for (const auto& m : messages) warn(where.empty() ? m : where + ": " + m);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OntologySet assemble_ontologies(const GlobalOptions& opts) {
  OntologySet set = builtin_ontologies();
  if (!opts.ontology_dir.empty()) {
    if (!fs::is_directory(opts.ontology_dir)) {
      throw Error(ErrorCode::kConfig, "not a directory", opts.ontology_dir);
    }
    for (OntologyKind kind : {OntologyKind::kFinding, OntologyKind::kDescriptor,
                              OntologyKind::kAnatomy}) {
      const fs::path file = fs::path(opts.ontology_dir) / (std::string(to_string(kind)) + ".json");
      if (!fs::exists(file)) continue;
      ConceptTable table = ontology_from_json(read_text(file.string()));
      if (table.kind() != kind) {
        throw Error(ErrorCode::kConfig, "table kind does not match file name", file.string());
      }
      (kind == OntologyKind::kFinding      ? set.finding
       : kind == OntologyKind::kDescriptor ? set.descriptor
                                           : set.anatomy) = std::move(table);
      set.provenance += "; " + std::string(to_string(kind)) + " from " + file.string();
    }
  }
  if (!opts.anatomy_file.empty()) {
    const auto roots = opts.anatomy_roots.empty() ? demo_anatomy_roots() : opts.anatomy_roots;
    set.anatomy = ingest_anatomy(read_text(opts.anatomy_file), roots, opts.anatomy_depth);
    set.provenance += "; anatomy from " + opts.anatomy_file;
  }
  return set;
}

OntologySet build_ontologies(const GlobalOptions& opts) {
  OntologySet set = assemble_ontologies(opts);
  for (OntologyKind kind : {OntologyKind::kFinding, OntologyKind::kDescriptor,
                            OntologyKind::kAnatomy}) {
    const ConceptTable& table = set.table(kind);
    if (table.empty()) {
      throw Error(ErrorCode::kCorruptData, "ontology table is empty",
                  std::string(to_string(kind)));
    }
    const auto diags = validate_ontology(table);
    if (!diags.empty()) {
      throw Error(ErrorCode::kCorruptData, diags.front().message,
                  std::string(to_string(kind)));
    }
  }
  return set;
}

NormalizationConfig load_config(const GlobalOptions& opts) {
  if (opts.config_path.empty()) return {};
  return load_normalization_config_file(opts.config_path);
}

std::unique_ptr<Normalizer> make_normalizer(const OntologySet& onts,
                                            const NormalizationConfig& cfg) {
  std::shared_ptr<DescriptorClassifier> classifier;
  if (cfg.provider == ProviderKind::kExternal) {
    classifier = std::make_shared<HttpDescriptorClassifier>(cfg.classifier_endpoint,
                                                            cfg.classifier_timeout_seconds);
  }
  return std::make_unique<Normalizer>(onts, cfg, nullptr, std::move(classifier));
}

WeightScheme parse_weights(const std::string& flags) {
  std::vector<int> values;
  for (const std::string& part : [&] {
         std::vector<std::string> parts;
         std::stringstream ss(flags);
         for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
         return parts;
       }()) {
    const std::string_view v = text::trim(part);
    if (v != "0" && v != "1") {
      throw Error(ErrorCode::kConfig, "weights must be four 0/1 flags", "--weights");
    }
    values.push_back(v == "1");
  }
  if (values.size() != 4) {
    throw Error(ErrorCode::kConfig, "weights must be four 0/1 flags", "--weights");
  }
  return scheme_from_flags(values[0], values[1], values[2], values[3]);
}

WeightScheme resolve_scheme(const std::string& scheme_path, const std::string& weights,
                            const WeightScheme& fallback) {
  if (!scheme_path.empty() && !weights.empty()) {
    throw Error(ErrorCode::kConfig, "--scheme and --weights are exclusive");
  }
  if (!scheme_path.empty()) return load_scheme_file(scheme_path);
  if (!weights.empty()) return parse_weights(weights);
  return fallback;
}

Corpus load_any_corpus(const std::string& path, const GlobalOptions& opts) {
  Corpus corpus = fs::is_directory(path) ? load_corpus_dir(path, opts.load_mode())
                                         : load_corpus(path, opts.load_mode());
  if (opts.auto_normalize) {
    const OntologySet onts = build_ontologies(opts);
    const auto normalizer = make_normalizer(onts, load_config(opts));
    std::vector<ReportGraph> out(corpus.graphs.size());
    parallel_for(out.size(), opts.jobs, [&](std::size_t i) {
      out[i] = normalizer->normalize_graph(corpus.graphs[i]);
    });
    corpus.graphs = std::move(out);
  }
  return corpus;
}

std::string join_concepts(const std::vector<ConceptRef>& concepts) {
  std::vector<std::string> parts;
  for (const auto& c : concepts) {
    parts.push_back(c.concept_id + ":" + text::format_double(c.similarity));
  }
  return text::join(parts, ";");
}

std::string tsv_cell(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

// normalize -------------------------------------------------------------

struct NormalizeArgs {
  std::string in_dir;
  std::string out_dir;
  std::string audit_path;
};

int cmd_normalize(const NormalizeArgs& args, const GlobalOptions& opts) {
  if (!fs::is_directory(args.in_dir)) {
    throw Error(ErrorCode::kIo, "input is not a directory", args.in_dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(args.in_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  fs::create_directories(args.out_dir);
  if (files.empty()) {
    warn("no graph files in " + args.in_dir);
    return 0;
  }
  const OntologySet onts = build_ontologies(opts);
  const auto normalizer = make_normalizer(onts, load_config(opts));

  struct FileResult {
    bool ok = false;
    std::string error;
    ReportGraph input;
    ReportGraph output;
    std::vector<NormalizationOutcome> outcomes;
    std::vector<std::string> warnings;
  };
  std::vector<FileResult> results(files.size());
  auto process = [&](std::size_t i) {
    FileResult& r = results[i];
    try {
      LoadedGraph loaded = load_graph_file(files[i].string(), opts.load_mode());
      r.input = std::move(loaded.graph);
      r.warnings = std::move(loaded.warnings);
      r.output = normalizer->normalize_graph(r.input, &r.outcomes);
      r.ok = true;
    } catch (const Error& e) {
      r.error = e.what();
    }
  };
  if (opts.strict) {
    for (std::size_t i = 0; i < files.size(); ++i) {
      process(i);
      if (!results[i].ok) {
        std::cerr << "error: " << results[i].error << "\n";
        return 1;
      }
    }
  } else {
    parallel_for(files.size(), opts.jobs, process);
  }

  std::string audit = "file\tentity_id\tlabel\ttext\tmethod\tconcepts\tcandidates\tnotes\n";
  int failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const FileResult& r = results[i];
    const std::string name = files[i].filename().string();
    if (!r.ok) {
      std::cerr << "error: " << r.error << "\n";
      ++failed;
      continue;
    }
    warn_all(r.warnings, name);
    write_text((fs::path(args.out_dir) / name).string(), save_graph(r.output));
    for (const NormalizationOutcome& o : r.outcomes) {
      if (o.method == NormalizationMethod::kExact) continue;
      const Entity* e = r.input.find_entity(o.entity_id);
      std::vector<std::string> cands;
      for (const Candidate& c : o.candidates) {
        cands.push_back(c.concept_id + ":" + text::format_double(c.similarity));
      }
      std::vector<std::string> notes = o.notes;
      if (!o.stripped.empty()) notes.push_back("stripped " + text::join(o.stripped, " "));
      audit += tsv_cell(name) + "\t" + tsv_cell(o.entity_id) + "\t" +
               std::string(e ? to_string(e->label) : "") + "\t" +
               tsv_cell(e ? e->text : "") + "\t" + std::string(to_string(o.method)) + "\t" +
               tsv_cell(join_concepts(o.concepts)) + "\t" + tsv_cell(text::join(cands, ";")) +
               "\t" + tsv_cell(text::join(notes, "; ")) + "\n";
    }
  }
  write_text(args.audit_path, audit);
  return failed ? 1 : 0;
}

// score -----------------------------------------------------------------

struct ScoreArgs {
  std::string gt;
  std::string pred;
  std::string scheme;
  std::string weights;
  bool pretty = false;
  bool no_ledger = false;
};

int cmd_score(const ScoreArgs& args, const GlobalOptions& opts) {
  const WeightScheme scheme = resolve_scheme(args.scheme, args.weights, unit_scheme());
  LoadedGraph gt = load_graph_file(args.gt, opts.load_mode());
  LoadedGraph pred = load_graph_file(args.pred, opts.load_mode());
  warn_all(gt.warnings, args.gt);
  warn_all(pred.warnings, args.pred);
  if (opts.auto_normalize) {
    const OntologySet onts = build_ontologies(opts);
    const auto normalizer = make_normalizer(onts, load_config(opts));
    gt.graph = normalizer->normalize_graph(gt.graph);
    pred.graph = normalizer->normalize_graph(pred.graph);
  }
  const ScoreReport report = score(gt.graph, pred.graph, scheme);
  warn_all(report.warnings);
  std::cout << score_report_to_json(report, !args.no_ledger);
  if (args.pretty) std::cerr << score_report_to_text(report);
  return 0;
}

// stats / top-k ---------------------------------------------------------

int cmd_stats(const std::string& corpus_path, const std::string& out,
              const GlobalOptions& opts) {
  const Corpus corpus = load_any_corpus(corpus_path, opts);
  write_text(out, negation_counts_to_csv(negation_counts(corpus.graphs)));
  return 0;
}

int cmd_top_k(const std::string& corpus_path, int k, double multiplier,
              const std::string& out, const GlobalOptions& opts) {
  const Corpus corpus = load_any_corpus(corpus_path, opts);
  const TopKScheme result = top_k_scheme(corpus.graphs, k, multiplier);
  warn_all(result.warnings);
  for (const ConceptCount& c : result.ranking) {
    std::cerr << c.concept_id << "\t" << c.negated << "\n";
  }
  write_text(out, scheme_to_json(result.scheme));
  return 0;
}

// experiments -----------------------------------------------------------

struct ExperimentArgs {
  std::string corpus;
  std::vector<std::string> schemes;
  std::string weights;
  std::string out;
  std::string csv_dir;
};

void emit_experiment(const ExperimentResult& result, const ExperimentArgs& args,
                     const GlobalOptions& opts) {
  warn_all(result.warnings);
  std::optional<std::string> stamp;
  if (opts.timestamp) stamp = utc_now();
  write_text(args.out, experiment_to_json(result, stamp));
  if (!args.csv_dir.empty()) {
    write_text((fs::path(args.csv_dir) / "pairs.csv").string(), pairs_to_csv(result));
    write_text((fs::path(args.csv_dir) / "aggregates.csv").string(),
               aggregates_to_csv(result));
  }
}

int cmd_normal_abnormal(const ExperimentArgs& args, const GlobalOptions& opts) {
  if (args.schemes.size() > 1) {
    throw Error(ErrorCode::kConfig, "normal-abnormal takes a single scheme", "--scheme");
  }
  const WeightScheme scheme =
      resolve_scheme(args.schemes.empty() ? "" : args.schemes.front(), args.weights,
                     scheme_from_flags(1, 0, 0, 0));
  const Corpus corpus = load_any_corpus(args.corpus, opts);
  emit_experiment(run_normal_abnormal(corpus, scheme, opts.jobs), args, opts);
  return 0;
}

int cmd_deltas(const ExperimentArgs& args, const GlobalOptions& opts) {
  std::vector<WeightScheme> schemes;
  for (const std::string& path : args.schemes) schemes.push_back(load_scheme_file(path));
  if (!args.weights.empty()) schemes.push_back(parse_weights(args.weights));
  if (schemes.empty()) schemes = standard_schemes();
  const Corpus corpus = load_any_corpus(args.corpus, opts);
  emit_experiment(run_modification_deltas(corpus, schemes, opts.jobs), args, opts);
  return 0;
}

// ontology --------------------------------------------------------------

int cmd_ontology_validate(const GlobalOptions& opts) {
  const OntologySet set = assemble_ontologies(opts);
  int problems = 0;
  for (OntologyKind kind : {OntologyKind::kFinding, OntologyKind::kDescriptor,
                            OntologyKind::kAnatomy}) {
    const ConceptTable& table = set.table(kind);
    const auto diags = validate_ontology(table);
    std::cout << to_string(kind) << "\t" << table.size() << " concepts\t"
              << diags.size() << " diagnostics\n";
    for (const Diagnostic& d : diags) {
      std::cout << "  " << to_string(d.kind) << "\t" << text::join(d.concepts, ",") << "\t"
                << d.message << "\n";
    }
    problems += static_cast<int>(diags.size()) + (table.empty() ? 1 : 0);
  }
  return problems ? 1 : 0;
}

int cmd_ontology_ingest(const std::string& csv_path, const std::vector<std::string>& roots,
                        int max_depth, const std::string& out) {
  if (max_depth < 0) throw Error(ErrorCode::kConfig, "max depth must be >= 0", "--max-depth");
  const ConceptTable table = ingest_anatomy(read_text(csv_path), roots, max_depth);
  write_text(out, ontology_to_json(table, "edge file " + fs::path(csv_path).filename().string() +
                                              ", max depth " + std::to_string(max_depth)));
  return 0;
}

int cmd_ontology_export(const std::string& which, const std::string& out,
                        const GlobalOptions& opts) {
  const auto kind = parse_ontology_kind(which);
  if (!kind) throw Error(ErrorCode::kConfig, "unknown table \"" + which + "\"", "--table");
  const OntologySet set = build_ontologies(opts);
  write_text(out, ontology_to_json(set.table(*kind), set.provenance));
  return 0;
}

int cmd_extract(const std::string& text_path, std::string report_id, const std::string& out,
                const GlobalOptions& opts) {
  if (report_id.empty()) report_id = fs::path(text_path).stem().string();
  const OntologySet set = build_ontologies(opts);
  write_text(out, save_graph(gazetteer_extract(read_text(text_path), set, report_id)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"headct-one: ontology-normalized weighted F1 for head CT report graphs"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "Normalization config (JSON)");
  app.add_option("--ontology-dir", opts.ontology_dir,
                 "Directory with finding.json / descriptor.json / anatomy.json overrides");
  app.add_option("--anatomy-file", opts.anatomy_file,
                 "Anatomy edge CSV (child_id,child_name,parent_id) replacing the demo vocabulary");
  app.add_option("--anatomy-root", opts.anatomy_roots, "Root concept for --anatomy-file");
  app.add_option("--anatomy-depth", opts.anatomy_depth, "Depth limit for --anatomy-file")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--jobs,-j", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", opts.strict,
               "Strict graph validation; abort batch work at the first error");
  app.add_flag("--timestamp", opts.timestamp, "Stamp experiment output with the current time");
  app.add_flag("--auto-normalize", opts.auto_normalize,
               "Normalize inputs before scoring or counting");

  NormalizeArgs norm;
  auto* normalize = app.add_subcommand("normalize", "Normalize every graph in a directory");
  normalize->add_option("input", norm.in_dir, "Directory of graph documents")->required();
  normalize->add_option("--out,-o", norm.out_dir, "Output directory")->required();
  normalize->add_option("--audit", norm.audit_path,
                        "Audit log of non-exact outcomes (TSV, default stdout)");

  ScoreArgs sc;
  auto* score_cmd = app.add_subcommand("score", "Score a candidate graph against a reference");
  score_cmd->add_option("gt", sc.gt, "Reference graph")->required();
  score_cmd->add_option("pred", sc.pred, "Candidate graph")->required();
  score_cmd->add_option("--scheme", sc.scheme, "Weight scheme file (JSON)");
  score_cmd->add_option("--weights", sc.weights, "Four 0/1 flags: OBS-P,OBS-A,ANAT,DESC");
  score_cmd->add_flag("--pretty", sc.pretty, "Also print a table to stderr");
  score_cmd->add_flag("--no-ledger", sc.no_ledger, "Omit the per-item ledger");

  std::string stats_corpus, stats_out;
  auto* stats = app.add_subcommand("stats", "Negation frequency table for a corpus");
  stats->add_option("corpus", stats_corpus, "Corpus manifest or directory")->required();
  stats->add_option("--out,-o", stats_out, "Output CSV (default stdout)");

  std::string topk_corpus, topk_out;
  int topk_k = 5;
  double topk_multiplier = kDefaultTopKMultiplier;
  auto* topk = app.add_subcommand("top-k", "Derive a top-K negated-concept weight scheme");
  topk->add_option("corpus", topk_corpus, "Corpus manifest or directory")->required();
  topk->add_option("--k", topk_k, "Number of boosted concepts")->check(CLI::PositiveNumber);
  topk->add_option("--multiplier", topk_multiplier, "Weight of boosted concepts")
      ->check(CLI::Range(1.0, 1e12));
  topk->add_option("--out,-o", topk_out, "Output scheme file (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "Corpus experiments");
  experiment->require_subcommand(1);
  ExperimentArgs na_args, delta_args;
  auto* na = experiment->add_subcommand("normal-abnormal",
                                        "Normal-normal vs normal-abnormal discrimination");
  auto* deltas = experiment->add_subcommand("deltas", "Rephrase and error-insertion deltas");
  for (auto [cmd, a] : {std::pair{na, &na_args}, std::pair{deltas, &delta_args}}) {
    cmd->add_option("corpus", a->corpus, "Corpus manifest")->required();
    cmd->add_option("--scheme", a->schemes, "Weight scheme file (repeatable for deltas)");
    cmd->add_option("--weights", a->weights, "Four 0/1 flags: OBS-P,OBS-A,ANAT,DESC");
    cmd->add_option("--out,-o", a->out, "Result JSON (default stdout)");
    cmd->add_option("--csv-dir", a->csv_dir, "Write pairs.csv and aggregates.csv here");
  }

  auto* ontology = app.add_subcommand("ontology", "Ontology tools");
  ontology->require_subcommand(1);
  auto* validate = ontology->add_subcommand("validate", "Check the active ontology tables");
  std::string ingest_csv, ingest_out;
  std::vector<std::string> ingest_roots;
  int ingest_depth = kDefaultAnatomyDepth;
  auto* ingest = ontology->add_subcommand("ingest-fma", "Build an anatomy table from an edge file");
  ingest->add_option("edges", ingest_csv, "Edge CSV")->required();
  ingest->add_option("--root", ingest_roots, "Root concept name or id")->required();
  ingest->add_option("--max-depth", ingest_depth, "Depth limit (root = 0)");
  ingest->add_option("--out,-o", ingest_out, "Output JSON (default stdout)");
  std::string export_table = "finding", export_out;
  auto* exp = ontology->add_subcommand("export", "Export a table as JSON");
  exp->add_option("--table", export_table, "finding, descriptor or anatomy");
  exp->add_option("--out,-o", export_out, "Output JSON (default stdout)");

  std::string extract_text, extract_id, extract_out;
  auto* extract = app.add_subcommand("extract", "Dictionary-based demo extraction from free text");
  extract->add_option("text", extract_text, "Report text file")->required();
  extract->add_option("--report-id", extract_id, "Report id (default file stem)");
  extract->add_option("--out,-o", extract_out, "Output graph (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*normalize) return cmd_normalize(norm, opts);
    if (*score_cmd) return cmd_score(sc, opts);
    if (*stats) return cmd_stats(stats_corpus, stats_out, opts);
    if (*topk) return cmd_top_k(topk_corpus, topk_k, topk_multiplier, topk_out, opts);
    if (*na) return cmd_normal_abnormal(na_args, opts);
    if (*deltas) return cmd_deltas(delta_args, opts);
    if (*validate) return cmd_ontology_validate(opts);
    if (*ingest) return cmd_ontology_ingest(ingest_csv, ingest_roots, ingest_depth, ingest_out);
    if (*exp) return cmd_ontology_export(export_table, export_out, opts);
    if (*extract) return cmd_extract(extract_text, extract_id, extract_out, opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: IoError: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
