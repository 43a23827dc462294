// Copyright 2026 The ExecEdit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver for the benchmark pipeline.
//
//   execedit generate  --documents D --seeds S --out DIR
//   execedit filter    --edits E --out DIR
//   execedit assemble  --edits E --seeds S --documents D --pool P --out DIR
//   execedit evaluate  --benchmark B --documents D --prompt D_AND_E --out DIR
//   execedit judge     --benchmark B --documents D --seeds S --responses R --out DIR
//   execedit score     --benchmark B --responses R... --judgments J... --out DIR
//   execedit compare-exec --annotations A --edits E... --out DIR
//   execedit taxonomy  --benchmark B --documents D --responses R --judgments J --out DIR
//   execedit serve     --data-dir DIR --edits E --seeds S --documents D
//   execedit report    --benchmark B | --annotations A --annotator-a X --annotator-b Y

#include <csignal>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "execedit/annotation.hpp"
#include "execedit/annotation_http.hpp"
#include "execedit/benchmark_builder.hpp"
#include "execedit/detection_harness.hpp"
#include "execedit/edit_synthesis.hpp"
#include "execedit/error.hpp"
#include "execedit/explanation_judge.hpp"
#include "execedit/explanation_taxonomy.hpp"
#include "execedit/gateway.hpp"
#include "execedit/hash.hpp"
#include "execedit/jsonl.hpp"
#include "execedit/metrics.hpp"
#include "execedit/mock_backend.hpp"
#include "execedit/openai_backend.hpp"
#include "execedit/parallel.hpp"
#include "execedit/prompt_template.hpp"
#include "execedit/triviality_filter.hpp"

namespace fs = std::filesystem;
using namespace execedit;

namespace {

constexpr int kExitPipelineFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string backend = "mock";
  std::string model = "mock-model";
  std::string base_url = "https://api.openai.com";
  std::string template_dir;
  std::string cache_dir;
  std::string mock_script;
  std::uint64_t seed = 0;
  int concurrency = 1;
  std::int64_t max_calls = 0;
  int max_retries = 3;
  std::string out;
  std::string log_level = "warn";
};

struct Inputs {
  std::string documents, seeds, pool, benchmark, annotations;
  std::vector<std::string> edits, responses, judgments;
  std::string mode = "executable";
  std::string prompt = "D_AND_E";
  std::string variant = "V4";
  double ratio = 0.5;
  int per_pair_cap = 2;
  std::string annotator_a, annotator_b;
  // serve
  std::string data_dir, host = "127.0.0.1", static_dir;
  int port = 8080;
  std::vector<std::string> items;
};

std::string UtcNow() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects what a run read, wrote and was configured with; written next to
// the outputs as <subcommand>.manifest.json.
class Manifest {
 public:
  Manifest(std::string subcommand, const CommonOptions& common)
      : subcommand_(std::move(subcommand)), out_(common.out) {
    doc_ = Json{{"subcommand", subcommand_},
                {"status", "running"},
                {"started_at", UtcNow()},
                {"seed", common.seed},
                {"config",
                 {{"backend", common.backend},
                  {"model", common.model},
                  {"concurrency", common.concurrency},
                  {"max_calls", common.max_calls},
                  {"max_retries", common.max_retries},
                  {"template_dir", common.template_dir},
                  {"cache_dir", common.cache_dir}}},
                {"inputs", Json::object()},
                {"outputs", Json::array()}};
  }

  std::string name() const { return subcommand_ + ".manifest.json"; }
  bool has_out() const { return !out_.empty(); }

  void Input(const std::string& path) {
    if (path.empty()) return;
    doc_["inputs"][path] = Sha256Hex(ReadFile(path));
  }
  void Config(const std::string& key, Json value) { doc_["config"][key] = std::move(value); }
  void Templates(const TemplateLibrary& lib) { doc_["templates"] = lib.Hashes(); }
  void Gateway(const execedit::Gateway& g) {
    doc_["gateway"] = {{"backend_calls", g.backend_calls()}, {"cache_hits", g.cache_hits()}};
  }

  fs::path Output(const std::string& file) {
    doc_["outputs"].push_back(file);
    return fs::path(out_) / file;
  }

  void Finish(const std::optional<std::string>& error) {
    doc_["status"] = error ? "failed" : "ok";
    doc_["finished_at"] = UtcNow();
    if (error) doc_["error"] = *error;
    if (out_.empty()) return;
    WriteFileAtomic(fs::path(out_) / name(), doc_.dump(2) + "\n");
    const fs::path marker = fs::path(out_) / (subcommand_ + ".FAILED");
    if (error) {
      WriteFileAtomic(marker, *error + "\n");
    } else {
      std::error_code ec;
      fs::remove(marker, ec);
    }
  }

 private:
  std::string subcommand_;
  std::string out_;
  Json doc_;
};

template <typename T>
void Write(Manifest& m, const std::string& file, std::string_view kind, const std::vector<T>& values) {
  WriteRecords(m.Output(file), kind, m.name(), values);
}

// Writes nothing when the run has no output directory (report to stdout).
void WriteText(Manifest& m, const std::string& file, const std::string& text) {
  if (m.has_out()) WriteFileAtomic(m.Output(file), text);
}

template <typename T, typename Key>
std::map<std::string, T> IndexBy(const std::vector<T>& values, Key key) {
  std::map<std::string, T> out;
  for (const auto& v : values) out.emplace(key(v), v);
  return out;
}

std::vector<DocumentRecord> LoadDocuments(Manifest& m, const std::string& path) {
  m.Input(path);
  return ReadRecords<DocumentRecord>(path, "documents");
}

std::vector<SeedSummary> LoadSeeds(Manifest& m, const std::string& path, std::string_view kind = "seed_summaries") {
  m.Input(path);
  return ReadRecords<SeedSummary>(path, kind);
}

std::map<std::string, DocumentRecord> DocumentIndex(const std::vector<DocumentRecord>& docs) {
  return IndexBy(docs, [](const DocumentRecord& d) { return d.doc_id; });
}

std::map<std::string, SeedSummary> SeedIndex(const std::vector<SeedSummary>& seeds) {
  return IndexBy(seeds, [](const SeedSummary& s) { return s.summary_id; });
}

std::vector<DetectionResponse> LoadResponses(Manifest& m, const std::vector<std::string>& paths) {
  std::vector<DetectionResponse> out;
  for (const auto& p : paths) {
    m.Input(p);
    auto part = ReadRecords<DetectionResponse>(p, "detection_responses");
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<JudgmentRecord> LoadJudgments(Manifest& m, const std::vector<std::string>& paths) {
  std::vector<JudgmentRecord> out;
  for (const auto& p : paths) {
    m.Input(p);
    auto part = ReadRecords<JudgmentRecord>(p, "judgments");
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::unique_ptr<execedit::Gateway> MakeGateway(const CommonOptions& c) {
  GatewayOptions opts;
  opts.max_calls = c.max_calls;
  opts.max_retries = c.max_retries;
  opts.cache_dir = c.cache_dir;
  auto gateway = std::make_unique<execedit::Gateway>(opts);
  std::shared_ptr<Backend> backend;
  if (c.backend == "mock") {
    backend = c.mock_script.empty() ? std::make_shared<MockBackend>()
                                    : MockBackend::FromJson(Json::parse(ReadFile(c.mock_script)));
  } else {
    OpenAiBackendOptions o;
    o.base_url = c.base_url;
    o.model = c.model;
    backend = OpenAiBackend::FromEnvironment(c.backend, o);
  }
  gateway->RegisterBackend(c.backend, backend, BackendLimits{std::max(1, c.concurrency), 0.0, 1.0});
  return gateway;
}

Json EventToJson(const GenerationEvent& e) {
  return Json{{"doc_id", e.doc_id}, {"summary_id", e.summary_id}, {"kind", e.kind}, {"detail", e.detail}};
}

Json TranscriptToJson(const GenerationTranscript& t) {
  return Json{{"doc_id", t.doc_id},
              {"summary_id", t.summary_id},
              {"mode", ToString(t.mode)},
              {"generator_model", t.generator_model},
              {"template_name", t.template_name},
              {"prompt_hash", t.prompt_hash},
              {"replies", t.replies},
              {"reasked", t.reasked}};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void RunGenerate(const CommonOptions& c, const Inputs& in, Manifest& m) {
  const auto docs = LoadDocuments(m, in.documents);
  const auto seeds = LoadSeeds(m, in.seeds);
  const auto doc_index = DocumentIndex(docs);
  const EditMode mode = FromString<EditMode>(in.mode);
  m.Config("mode", in.mode);
  const TemplateLibrary lib = TemplateLibrary::Load(c.template_dir);
  m.Templates(lib);
  auto gateway = MakeGateway(c);

  const GenerationConfig config{c.backend, c.model, kGenerationTemperature, 2048};
  const auto results = ParallelMap(seeds.size(), c.concurrency, [&](std::size_t i) {
    const auto doc = doc_index.find(seeds[i].doc_id);
    if (doc == doc_index.end()) {
      throw Error(ErrorCode::kInvalidArgument, "seed " + seeds[i].summary_id + " has unknown doc_id");
    }
    return GenerateEdits(*gateway, lib, doc->second, seeds[i], mode, config);
  });

  std::vector<ExecutableEdit> exec;
  std::vector<NonExecutableEdit> non_exec;
  std::vector<Json> events, transcripts;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const GenerationResult& r = results[i];
    for (const auto& e : r.events) events.push_back(EventToJson(e));
    transcripts.push_back(TranscriptToJson(r.transcript));
    if (mode == EditMode::kExecutable) {
      PreparedEdits prepared = PrepareEdits(seeds[i], r.executable);
      for (const auto& e : prepared.events) events.push_back(EventToJson(e));
      exec.insert(exec.end(), prepared.edits.begin(), prepared.edits.end());
    } else {
      non_exec.insert(non_exec.end(), r.non_executable.begin(), r.non_executable.end());
    }
  }
  if (mode == EditMode::kExecutable) {
    Write(m, "edits.jsonl", "executable_edits", exec);
  } else {
    Write(m, "edits.jsonl", "non_executable_edits", non_exec);
  }
  WriteJsonlFile(m.Output("generation_events.jsonl"), {kSchemaVersion, "generation_events", m.name()}, events);
  WriteJsonlFile(m.Output("transcripts.jsonl"), {kSchemaVersion, "generation_transcripts", m.name()},
                 transcripts);
  m.Gateway(*gateway);
  std::printf("%zu pairs, %zu edits, %zu events\n", seeds.size(),
              mode == EditMode::kExecutable ? exec.size() : non_exec.size(), events.size());
}

void RunFilter(const CommonOptions& c, const Inputs& in, Manifest& m) {
  if (in.edits.size() != 1) throw Error(ErrorCode::kInvalidArgument, "filter takes exactly one --edits file");
  m.Input(in.edits[0]);
  const auto edits = ReadRecords<ExecutableEdit>(in.edits[0], "executable_edits");
  const TemplateLibrary lib = TemplateLibrary::Load(c.template_dir);
  m.Templates(lib);
  auto gateway = MakeGateway(c);

  const auto outcomes = ClassifyEdits(*gateway, lib, edits,
                                      ClassifierConfig{c.backend, c.model, kEvaluationTemperature, 256,
                                                       c.concurrency});
  std::vector<std::pair<ExecutableEdit, TrivialityCategory>> classified;
  std::vector<TrivialityAuditRecord> audit;
  std::size_t flagged = 0;
  for (const auto& o : outcomes) {
    classified.emplace_back(o.edit, o.category);
    audit.push_back(ToAuditRecord(o));
    if (o.flagged) ++flagged;
  }
  const auto kept = FilterTrivial(classified);
  Write(m, "kept_edits.jsonl", "executable_edits", kept);
  Write(m, "triviality_audit.jsonl", "triviality_audit", audit);
  m.Gateway(*gateway);
  std::printf("%zu edits, %zu kept, %zu flagged\n", edits.size(), kept.size(), flagged);
}


void RunAssemble(const CommonOptions& c, const Inputs& in, Manifest& m) {
  if (in.edits.size() != 1) throw Error(ErrorCode::kInvalidArgument, "assemble takes exactly one --edits file");
  m.Input(in.edits[0]);
  const auto edits = ReadRecords<ExecutableEdit>(in.edits[0], "executable_edits");
  const auto seeds = LoadSeeds(m, in.seeds);
  const auto docs = LoadDocuments(m, in.documents);
  const auto pool = LoadSeeds(m, in.pool);
  const BalancePolicy policy{in.ratio, in.per_pair_cap, c.seed};
  m.Config("target_ratio", in.ratio);
  m.Config("per_pair_cap", in.per_pair_cap);

  const auto benchmark = AssembleBenchmark(GroupByPair(edits), seeds, docs, pool, policy);
  const DomainStats stats = ComputeDomainStats(benchmark);
  Write(m, "benchmark.jsonl", "benchmark", benchmark);
  WriteText(m, "domain_stats.txt", FormatDomainStats(stats));
  WriteText(m, "domain_stats.json", DomainStatsToJson(stats).dump(2) + "\n");
  std::fputs(FormatDomainStats(stats).c_str(), stdout);
}

void RunEvaluate(const CommonOptions& c, const Inputs& in, Manifest& m) {
  m.Input(in.benchmark);
  const auto benchmark = ReadRecords<BenchmarkSample>(in.benchmark, "benchmark");
  const auto docs = DocumentIndex(LoadDocuments(m, in.documents));
  const PromptKind kind = FromString<PromptKind>(in.prompt);
  m.Config("prompt_kind", in.prompt);
  const TemplateLibrary lib = TemplateLibrary::Load(c.template_dir);
  m.Templates(lib);
  auto gateway = MakeGateway(c);

  const auto responses = EvaluateDetection(
      *gateway, lib, benchmark, docs, kind,
      DetectionConfig{c.backend, c.model, kEvaluationTemperature, 1024, c.concurrency});
  Write(m, "responses.jsonl", "detection_responses", responses);
  m.Gateway(*gateway);
  std::size_t unparsable = 0;
  for (const auto& r : responses) unparsable += r.verdict == Verdict::kUnparsable;
  std::printf("%zu responses, %zu unparsable\n", responses.size(), unparsable);
}

void RunJudge(const CommonOptions& c, const Inputs& in, Manifest& m) {
  m.Input(in.benchmark);
  const auto benchmark = ReadRecords<BenchmarkSample>(in.benchmark, "benchmark");
  const auto docs = DocumentIndex(LoadDocuments(m, in.documents));
  const auto seeds = SeedIndex(LoadSeeds(m, in.seeds));
  const auto responses = LoadResponses(m, in.responses);
  const JudgeVariant variant = FromString<JudgeVariant>(in.variant);
  m.Config("variant", in.variant);
  const TemplateLibrary lib = TemplateLibrary::Load(c.template_dir);
  m.Templates(lib);
  auto gateway = MakeGateway(c);

  const auto judgments =
      JudgeResponses(*gateway, lib, benchmark, docs, seeds, responses, variant,
                     JudgeConfig{c.backend, c.model, kEvaluationTemperature, 256, c.concurrency});
  Write(m, "judgments.jsonl", "judgments", judgments);
  m.Gateway(*gateway);
  std::size_t flagged = 0;
  for (const auto& j : judgments) flagged += j.flagged;
  std::printf("%zu judgments, %zu flagged\n", judgments.size(), flagged);
}

void RunScore(const CommonOptions& /*c*/, const Inputs& in, Manifest& m) {
  m.Input(in.benchmark);
  const auto benchmark = ReadRecords<BenchmarkSample>(in.benchmark, "benchmark");
  const auto responses = LoadResponses(m, in.responses);
  const JudgeVariant variant = FromString<JudgeVariant>(in.variant);
  m.Config("variant", in.variant);
  std::vector<JudgmentRecord> judgments;
  for (auto& j : LoadJudgments(m, in.judgments)) {
    if (j.variant == variant) judgments.push_back(std::move(j));
  }

  std::vector<std::pair<std::string, PromptKind>> keys;
  std::map<std::pair<std::string, PromptKind>, std::vector<DetectionResponse>> groups;
  for (const auto& r : responses) {
    const auto key = std::pair{r.model, r.prompt_kind};
    if (!groups.contains(key)) keys.push_back(key);
    groups[key].push_back(r);
  }
  std::vector<ScoreRow> rows;
  for (const auto& key : keys) rows.push_back(ComputeScoreRow(benchmark, groups[key], judgments));

  Json json = Json::array();
  for (const auto& r : rows) json.push_back(ScoreRowToJson(r));
  WriteText(m, "scores.txt", FormatScoreTable(rows));
  WriteText(m, "scores.csv", ScoreTableCsv(rows));
  WriteText(m, "scores.json", json.dump(2) + "\n");
  std::fputs(FormatScoreTable(rows).c_str(), stdout);
}

// edit_id -> condition label, from executable or non-executable edit files.
std::vector<std::pair<std::string, std::string>> EditConditions(Manifest& m,
                                                                const std::vector<std::string>& paths) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& p : paths) {
    m.Input(p);
    const JsonlContents contents = ReadJsonlFile(p);
    if (contents.header.kind == "executable_edits") {
      for (const auto& e : FromJsonRecords<ExecutableEdit>(contents.records)) {
        out.emplace_back(e.edit_id, ConditionLabel(e.generator_model, EditMode::kExecutable));
      }
    } else if (contents.header.kind == "non_executable_edits") {
      for (const auto& e : FromJsonRecords<NonExecutableEdit>(contents.records)) {
        out.emplace_back(e.edit_id, ConditionLabel(e.generator_model, EditMode::kNonExecutable));
      }
    } else {
      throw Error(ErrorCode::kInvalidArgument, p + " is not an edits file");
    }
  }
  return out;
}

void RunCompareExec(const CommonOptions& /*c*/, const Inputs& in, Manifest& m) {
  m.Input(in.annotations);
  const auto records = ReadRecords<AnnotationRecord>(in.annotations, "annotations");
  const auto conditions = EditConditions(m, in.edits);
  std::map<std::string, std::string> condition_of(conditions.begin(), conditions.end());

  std::vector<std::pair<std::string, std::vector<AnnotationRecord>>> groups;
  std::map<std::string, std::size_t> group_index;
  for (const auto& [id, condition] : conditions) {
    if (group_index.emplace(condition, groups.size()).second) groups.push_back({condition, {}});
  }
  std::size_t skipped = 0;
  for (const auto& r : records) {
    if (r.kind != AnnotationKind::kEditQuality) continue;
    const auto it = condition_of.find(r.target_id);
    if (it == condition_of.end()) {
      ++skipped;
      continue;
    }
    groups[group_index.at(it->second)].second.push_back(r);
  }
  if (skipped > 0) spdlog::warn("{} annotations reference edits outside the given files", skipped);
  std::erase_if(groups, [](const auto& g) { return g.second.empty(); });

  const auto rows = SequentialFilterTable(groups);
  WriteText(m, "filter_table.txt", FormatFilterTable(rows));
  WriteText(m, "filter_table.json", FilterTableToJson(rows).dump(2) + "\n");
  std::fputs(FormatFilterTable(rows).c_str(), stdout);
}

void RunTaxonomy(const CommonOptions& c, const Inputs& in, Manifest& m) {
  m.Input(in.benchmark);
  const auto benchmark = ReadRecords<BenchmarkSample>(in.benchmark, "benchmark");
  const auto docs = DocumentIndex(LoadDocuments(m, in.documents));
  const auto responses = LoadResponses(m, in.responses);
  const auto judgments = LoadJudgments(m, in.judgments);
  const TemplateLibrary lib = TemplateLibrary::Load(c.template_dir);
  m.Templates(lib);
  auto gateway = MakeGateway(c);

  const auto records = ClassifyExplanationErrors(
      *gateway, lib, benchmark, docs, responses, judgments,
      JudgeConfig{c.backend, c.model, kEvaluationTemperature, 256, c.concurrency});
  Write(m, "taxonomy.jsonl", "taxonomy", records);
  m.Gateway(*gateway);
  if (records.empty()) {
    std::puts("no explanations below 1.0; nothing to classify");
    return;
  }
  std::vector<ErrorCategory> categories;
  for (const auto& r : records) categories.push_back(r.category);
  const TaxonomyReport report = ComputeTaxonomyReport(categories);
  WriteText(m, "taxonomy_report.txt", FormatTaxonomyReport(report));
  WriteText(m, "taxonomy_report.json", TaxonomyReportToJson(report).dump(2) + "\n");
  std::fputs(FormatTaxonomyReport(report).c_str(), stdout);
}

void RunReport(const CommonOptions& /*c*/, const Inputs& in, Manifest& m) {
  Json out = Json::object();
  std::string text;
  if (!in.benchmark.empty()) {
    m.Input(in.benchmark);
    const DomainStats stats = ComputeDomainStats(ReadRecords<BenchmarkSample>(in.benchmark, "benchmark"));
    out["domain_stats"] = DomainStatsToJson(stats);
    text += FormatDomainStats(stats) + "\n";
  }
  if (!in.annotations.empty()) {
    m.Input(in.annotations);
    const auto records = ReadRecords<AnnotationRecord>(in.annotations, "annotations");
    if (!in.annotator_a.empty() && !in.annotator_b.empty()) {
      const auto rows = IaaTable(records, in.annotator_a, in.annotator_b);
      Json iaa = Json::array();
      for (const auto& r : rows) iaa.push_back(Json{{"question", r.question}, {"report", AgreementToJson(r.report)}});
      try {
        const IaaResult labels = ComputeLabelIaa(records, in.annotator_a, in.annotator_b);
        iaa.push_back(Json{{"question", labels.question}, {"report", AgreementToJson(labels.report)}});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyOverlap) throw;
      }
      out["iaa"] = iaa;
      text += FormatIaaTable(rows) + "\n";
    }
    if (!in.judgments.empty() && !in.annotator_a.empty()) {
      // Judge labels against one annotator's manual explanation labels.
      std::map<std::string, double> manual;
      for (const auto& r : records) {
        if (r.kind == AnnotationKind::kExplanationLabel && r.annotator_id == in.annotator_a && r.label) {
          manual[r.target_id] = *r.label;
        }
      }
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_judge;
      for (const auto& j : LoadJudgments(m, in.judgments)) {
        const auto it = manual.find(ExplanationItemId(j.sample_id, j.candidate_model, j.prompt_kind));
        if (it == manual.end()) continue;
        auto& [judge, gold] = by_judge[j.judge_model + " " + std::string(ToString(j.variant))];
        judge.push_back(j.label);
        gold.push_back(it->second);
      }
      Json calibration = Json::object();
      char line[256];
      text += "Judge                       N   Pearson  Spearman    BAcc\n";
      for (const auto& [key, v] : by_judge) {
        const AgreementReport r = CalibrationReport(v.first, v.second);
        calibration[key] = AgreementToJson(r);
        std::snprintf(line, sizeof line, "%-24s %4zu %9.3f %9.3f %7.3f\n", key.c_str(), r.n,
                      r.pearson_r.value_or(NAN), r.spearman_rho.value_or(NAN),
                      r.balanced_accuracy.value_or(NAN));
        text += line;
      }
      out["calibration"] = calibration;
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "report needs --benchmark or --annotations");
  WriteText(m, "report.txt", text);
  WriteText(m, "report.json", out.dump(2) + "\n");
  std::fputs(text.c_str(), stdout);
}

std::pair<std::string, std::string> NamedPath(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
  return {fs::path(arg).stem().string(), arg};
}

void RunServe(const CommonOptions& /*c*/, const Inputs& in, Manifest& m) {
  AnnotationService service(in.data_dir);
  std::map<std::string, SeedSummary> seeds;
  std::map<std::string, DocumentRecord> docs;
  if (!in.seeds.empty()) seeds = SeedIndex(LoadSeeds(m, in.seeds));
  if (!in.documents.empty()) docs = DocumentIndex(LoadDocuments(m, in.documents));
  std::size_t sources = 0;
  for (const auto& arg : in.edits) {
    const auto [name, path] = NamedPath(arg);
    m.Input(path);
    const JsonlContents contents = ReadJsonlFile(path);
    if (contents.header.kind == "executable_edits") {
      service.AddItemSource(name, ItemsFromExecutableEdits(
                                      FromJsonRecords<ExecutableEdit>(contents.records), seeds, docs));
    } else if (contents.header.kind == "non_executable_edits") {
      service.AddItemSource(name, ItemsFromNonExecutableEdits(
                                      FromJsonRecords<NonExecutableEdit>(contents.records), seeds, docs));
    } else {
      throw Error(ErrorCode::kInvalidArgument, path + " is not an edits file");
    }
    ++sources;
  }
  for (const auto& arg : in.items) {
    const auto [name, path] = NamedPath(arg);
    m.Input(path);
    service.AddItemSource(name, ReadRecords<AnnotationItem>(path, "annotation_items"));
    ++sources;
  }
  if (!in.responses.empty()) {
    m.Input(in.benchmark);
    const auto benchmark = ReadRecords<BenchmarkSample>(in.benchmark, "benchmark");
    service.AddItemSource("explanations",
                          ItemsFromExplanations(benchmark, LoadResponses(m, in.responses), seeds, docs));
    ++sources;
  }
  if (sources == 0) throw Error(ErrorCode::kInvalidArgument, "serve needs --edits, --items or --responses");
  service.Restore();

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  AnnotationHttpServer server(service, in.static_dir);
  const int port = server.Bind(in.host, in.port);
  if (port < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + in.host + ":" + std::to_string(in.port));
  }
  std::printf("listening on http://%s:%d\n", in.host.c_str(), port);
  std::fflush(stdout);
  std::thread serving([&] { server.Serve(); });
  int received = 0;
  sigwait(&signals, &received);
  server.Stop();
  serving.join();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factual-inconsistency benchmark pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

  CommonOptions common;
  Inputs in;
  app.add_option("--backend", common.backend, "Backend name: 'mock' or an OpenAI-compatible endpoint")
      ->capture_default_str();
  app.add_option("--model", common.model, "Model name sent to the backend")->capture_default_str();
  app.add_option("--base-url", common.base_url, "Endpoint for non-mock backends")->capture_default_str();
  app.add_option("--template-dir", common.template_dir, "Directory of <name>.txt templates overriding the built-ins");
  app.add_option("--cache-dir", common.cache_dir, "Response cache directory");
  app.add_option("--mock-script", common.mock_script, "JSON script for the mock backend");
  app.add_option("--seed", common.seed, "Sampling seed")->capture_default_str();
  app.add_option("--concurrency", common.concurrency, "Parallel backend calls")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-calls", common.max_calls, "Backend call budget per run (0 = unlimited)")->capture_default_str();
  app.add_option("--max-retries", common.max_retries, "Retries after a transient backend failure")->capture_default_str();
  app.add_option("--out", common.out, "Output directory");
  app.add_option("--log-level", common.log_level, "trace, debug, info, warn, error")->capture_default_str();

  using Runner = void (*)(const CommonOptions&, const Inputs&, Manifest&);
  std::map<CLI::App*, std::pair<std::string, Runner>> runners;
  auto sub = [&](const std::string& name, const std::string& help, Runner run) {
    CLI::App* s = app.add_subcommand(name, help);
    runners[s] = {name, run};
    return s;
  };

  CLI::App* gen = sub("generate", "Propose edits for every (document, summary) pair", RunGenerate);
  gen->add_option("--documents", in.documents)->required();
  gen->add_option("--seeds", in.seeds)->required();
  gen->add_option("--mode", in.mode)->check(CLI::IsMember({"executable", "non_executable"}))->capture_default_str();

  CLI::App* filt = sub("filter", "Classify edits and drop trivial ones", RunFilter);
  filt->add_option("--edits", in.edits)->required();

  CLI::App* asm_ = sub("assemble", "Build a balanced benchmark from kept edits", RunAssemble);
  asm_->add_option("--edits", in.edits)->required();
  asm_->add_option("--seeds", in.seeds)->required();
  asm_->add_option("--documents", in.documents)->required();
  asm_->add_option("--pool", in.pool, "Consistent summaries to balance with")->required();
  asm_->add_option("--ratio", in.ratio, "Fraction of inconsistent samples")->capture_default_str();
  asm_->add_option("--per-pair-cap", in.per_pair_cap)->capture_default_str();

  CLI::App* eval = sub("evaluate", "Run a candidate model over a benchmark", RunEvaluate);
  eval->add_option("--benchmark", in.benchmark)->required();
  eval->add_option("--documents", in.documents)->required();
  eval->add_option("--prompt", in.prompt)->check(CLI::IsMember({"D_AND_E", "E_GIVEN_D"}))->capture_default_str();

  CLI::App* judge = sub("judge", "Grade candidate explanations", RunJudge);
  judge->add_option("--benchmark", in.benchmark)->required();
  judge->add_option("--documents", in.documents)->required();
  judge->add_option("--seeds", in.seeds)->required();
  judge->add_option("--responses", in.responses)->required();
  judge->add_option("--variant", in.variant)->check(CLI::IsMember({"V1", "V2", "V3", "V4"}))->capture_default_str();

  CLI::App* score = sub("score", "Compute DA, DS, ES and JS", RunScore);
  score->add_option("--benchmark", in.benchmark)->required();
  score->add_option("--responses", in.responses)->required();
  score->add_option("--judgments", in.judgments)->required();
  score->add_option("--variant", in.variant)->check(CLI::IsMember({"V1", "V2", "V3", "V4"}))->capture_default_str();

  CLI::App* cmp = sub("compare-exec", "Sequential quality table from edit annotations", RunCompareExec);
  cmp->add_option("--annotations", in.annotations)->required();
  cmp->add_option("--edits", in.edits, "Edit files naming each annotated edit's condition")->required();

  CLI::App* tax = sub("taxonomy", "Classify the errors of imperfect explanations", RunTaxonomy);
  tax->add_option("--benchmark", in.benchmark)->required();
  tax->add_option("--documents", in.documents)->required();
  tax->add_option("--responses", in.responses)->required();
  tax->add_option("--judgments", in.judgments)->required();

  CLI::App* serve = sub("serve", "Serve the annotation API", RunServe);
  serve->add_option("--data-dir", in.data_dir, "Where annotations and sessions are stored")->required();
  serve->add_option("--host", in.host)->capture_default_str();
  serve->add_option("--port", in.port)->capture_default_str();
  serve->add_option("--static-dir", in.static_dir, "Directory served at /");
  serve->add_option("--edits", in.edits, "[name=]edits.jsonl");
  serve->add_option("--items", in.items, "[name=]annotation_items.jsonl");
  serve->add_option("--responses", in.responses, "Responses whose explanations get labelled");
  serve->add_option("--benchmark", in.benchmark);
  serve->add_option("--seeds", in.seeds);
  serve->add_option("--documents", in.documents);

  CLI::App* rep = sub("report", "Domain statistics, IAA and judge calibration", RunReport);
  rep->add_option("--benchmark", in.benchmark);
  rep->add_option("--annotations", in.annotations);
  rep->add_option("--annotator-a", in.annotator_a);
  rep->add_option("--annotator-b", in.annotator_b);
  rep->add_option("--judgments", in.judgments);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  auto logger = spdlog::stderr_color_mt("execedit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(common.log_level));

  CLI::App* chosen = app.get_subcommands().front();
  const auto& [name, run] = runners.at(chosen);
  if (common.out.empty() && name != "serve" && name != "report") {
    std::cerr << "error: --out is required for " << name << "\n";
    return kExitUsage;
  }
  if (!common.out.empty()) fs::create_directories(common.out);

  Manifest manifest(name, common);
  try {
    run(common, in, manifest);
  } catch (const std::exception& e) {
    std::cerr << name << " failed: " << e.what() << "\n";
    try {
      manifest.Finish(std::string(e.what()));
    } catch (const std::exception& inner) {
      std::cerr << "could not write the failure marker: " << inner.what() << "\n";
    }
    return kExitPipelineFailure;
  }
  manifest.Finish(std::nullopt);
  return 0;
}
