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

#pragma once

// Synthetic corpus and scripted backend for the offline pipeline run:
// 100 (document, summary) pairs, 6 scripted edits each, 30% of them trivial.

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <regex>
#include <string>
#include <vector>

#include "execedit/benchmark_builder.hpp"
#include "execedit/edit_synthesis.hpp"
#include "execedit/gateway.hpp"
#include "execedit/jsonl.hpp"
#include "execedit/mock_backend.hpp"
#include "execedit/prompt_template.hpp"
#include "execedit/triviality_filter.hpp"

namespace e2e {

inline constexpr int kPairs = 100;
inline constexpr int kEditsPerPair = 6;
inline constexpr int kPoolPerPair = 5;
inline const char* const kDomains[] = {"News", "BillSum", "SamSum", "Podcast", "QMSum"};

inline std::string Id(const char* prefix, int p) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%03d", prefix, p);
  return buf;
}

inline std::string Fact(int p, int j) {
  return "fact " + std::to_string(p) + "." + std::to_string(j) + " holds";
}

// (p * 6 + j) % 10 < 3 marks exactly 180 of the 600 edits as trivial.
inline bool IsTrivial(int p, int j) { return (p * kEditsPerPair + j) % 10 < 3; }

struct Corpus {
  std::vector<execedit::DocumentRecord> documents;
  std::vector<execedit::SeedSummary> seeds;
  std::vector<execedit::SeedSummary> pool;
};

inline Corpus MakeCorpus() {
  Corpus c;
  for (int p = 0; p < kPairs; ++p) {
    const std::string doc = Id("d", p);
    std::string summary = "Summary " + std::to_string(p) + ":";
    for (int j = 0; j < kEditsPerPair; ++j) summary += " " + Fact(p, j) + ";";
    c.documents.push_back({doc, kDomains[p % 5], "Document " + std::to_string(p) + " body."});
    c.seeds.push_back({Id("m", p), doc, summary});
    for (int k = 0; k < kPoolPerPair; ++k) {
      c.pool.push_back(
          {Id("c", p) + "_" + std::to_string(k), doc,
           "Consistent summary " + std::to_string(k) + " of document " + std::to_string(p) + "."});
    }
  }
  return c;
}

// Answers generation by request tag and triviality by the OG_TEXT in the
// prompt; anything else is left unanswered.
inline std::shared_ptr<execedit::MockBackend> MakeBackend() {
  auto mock = std::make_shared<execedit::MockBackend>();
  mock->SetResponder([](const execedit::CompletionRequest& r) -> std::optional<std::string> {
    static const std::regex gen_tag(R"(^generate:executable:d(\d+):m\d+$)");
    static const std::regex fact(R"(fact (\d+)\.(\d+) holds)");
    std::smatch m;
    if (std::regex_match(r.request_tag, m, gen_tag)) {
      const int p = std::stoi(m[1]);
      execedit::Json edits = execedit::Json::array();
      for (int j = 0; j < kEditsPerPair; ++j) {
        edits.push_back({{"original_text", Fact(p, j)},
                         {"replace_text", "fact " + std::to_string(p) + "." + std::to_string(j) +
                                              " fails"},
                         {"explanation", "The document says fact " + std::to_string(j) +
                                             " holds."}});
      }
      return execedit::Json{{"edits", edits}}.dump();
    }
    if (r.request_tag.rfind("classify:", 0) == 0 && std::regex_search(r.prompt, m, fact)) {
      const bool trivial = IsTrivial(std::stoi(m[1]), std::stoi(m[2]));
      return execedit::Json{{"category", trivial ? "NUMBER_CHANGE" : "OTHER"}}.dump();
    }
    return std::nullopt;
  });
  return mock;
}

struct RunResult {
  std::vector<execedit::BenchmarkSample> benchmark;
  std::size_t generated = 0;
  std::size_t kept = 0;
  std::int64_t backend_calls = 0;
  std::int64_t mock_calls = 0;
};

// generate -> filter -> assemble. With `out_dir` every stage's output is
// written as JSONL.
inline RunResult RunPipeline(std::uint64_t seed, const std::filesystem::path& out_dir = {}) {
  using namespace execedit;
  const Corpus corpus = MakeCorpus();
  GatewayOptions options;
  options.initial_backoff = std::chrono::milliseconds(0);
  Gateway gateway(options);
  const auto mock = MakeBackend();
  gateway.RegisterBackend("mock", mock);
  const TemplateLibrary library = TemplateLibrary::Builtin();

  RunResult result;
  std::vector<ExecutableEdit> edits;
  GenerationConfig gen{"mock", "mock-generator"};
  for (std::size_t i = 0; i < corpus.seeds.size(); ++i) {
    GenerationResult g = GenerateEdits(gateway, library, corpus.documents[i], corpus.seeds[i],
                                       EditMode::kExecutable, gen);
    PreparedEdits prepared = PrepareEdits(corpus.seeds[i], g.executable);
    edits.insert(edits.end(), prepared.edits.begin(), prepared.edits.end());
  }
  result.generated = edits.size();

  const auto outcomes = ClassifyEdits(gateway, library, edits, {"mock", "mock-classifier"});
  std::vector<std::pair<ExecutableEdit, TrivialityCategory>> classified;
  for (const auto& o : outcomes) classified.emplace_back(o.edit, o.category);
  const std::vector<ExecutableEdit> kept = FilterTrivial(classified);
  result.kept = kept.size();

  result.benchmark = AssembleBenchmark(GroupByPair(kept), corpus.seeds, corpus.documents,
                                       corpus.pool, BalancePolicy{0.5, kEditsPerPair, seed});
  result.backend_calls = gateway.backend_calls();
  result.mock_calls = mock->calls();

  if (!out_dir.empty()) {
    WriteRecords(out_dir / "edits.jsonl", "executable_edits", "", edits);
    WriteRecords(out_dir / "kept_edits.jsonl", "executable_edits", "", kept);
    WriteRecords(out_dir / "benchmark.jsonl", "benchmark", "", result.benchmark);
    WriteFileAtomic(out_dir / "domain_stats.txt",
                    FormatDomainStats(ComputeDomainStats(result.benchmark)));
  }
  return result;
}

}  // namespace e2e
