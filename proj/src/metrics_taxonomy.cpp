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

#include <cstdio>
#include <sstream>

#include <spdlog/spdlog.h>

#include "execedit/benchmark_builder.hpp"
#include "execedit/explanation_taxonomy.hpp"
#include "execedit/json_extract.hpp"
#include "execedit/metrics.hpp"
#include "execedit/parallel.hpp"
#include "execedit/text.hpp"

namespace execedit {

TaxonomyReport ComputeTaxonomyReport(std::span<const ErrorCategory> categories) {
  if (categories.empty()) throw Error(ErrorCode::kEmptyInput, "taxonomy_report");
  TaxonomyReport r;
  r.total = categories.size();
  for (ErrorCategory c : categories) ++r.counts[static_cast<std::size_t>(c)];
  for (std::size_t k = 0; k < 4; ++k) {
    r.percent[k] = RoundHalfUp(
        100.0 * static_cast<double>(r.counts[k]) / static_cast<double>(r.total), 1);
  }
  return r;
}

std::string FormatTaxonomyReport(const TaxonomyReport& report) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %6s %8s\n", "Category", "Count", "Percent");
  os << line;
  for (std::size_t k = 0; k < 4; ++k) {
    std::snprintf(line, sizeof line, "%-22s %6zu %8.1f\n",
                  std::string(ToString(static_cast<ErrorCategory>(k))).c_str(), report.counts[k],
                  report.percent[k]);
    os << line;
  }
  std::snprintf(line, sizeof line, "%-22s %6zu\n", "Total", report.total);
  os << line;
  return os.str();
}

Json TaxonomyReportToJson(const TaxonomyReport& report) {
  Json categories = Json::object();
  for (std::size_t k = 0; k < 4; ++k) {
    categories[std::string(ToString(static_cast<ErrorCategory>(k)))] =
        Json{{"count", report.counts[k]}, {"percent", report.percent[k]}};
  }
  return Json{{"total", report.total}, {"categories", categories}};
}

ErrorCategory ParseErrorCategory(std::string_view raw) {
  const Json obj = ExtractJsonObject(raw);
  const auto it = obj.find("category");
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::kUnparsable, "reply has no string \"category\"");
  }
  try {
    return FromString<ErrorCategory>(Trim(it->get<std::string>()));
  } catch (const Error& e) {
    throw Error(ErrorCode::kUnparsable, e.what());
  }
}

TaxonomyOutcome ClassifyExplanationError(Gateway& gateway, const TemplateLibrary& library,
                                         const BenchmarkSample& sample,
                                         const DocumentRecord& document,
                                         const std::string& candidate_explanation,
                                         const JudgeConfig& config,
                                         const std::string& request_tag) {
  const std::string prompt =
      RenderTemplate(library.Get(templates::kClassifyExplanationError),
                     {{"DOCUMENT", document.text},
                      {"SUMMARY", sample.summary_text},
                      {"REFERENCE_EXPLANATION", sample.reference_explanation.value_or("")},
                      {"EXPLANATION", candidate_explanation}});
  auto call = CompleteParsed(
      gateway, {config.backend, prompt, config.temperature, config.max_tokens, request_tag},
      [](const std::string& raw) { return ParseErrorCategory(raw); });
  TaxonomyOutcome out;
  out.category = call.value.value_or(ErrorCategory::kVague);
  out.flagged = !call.value.has_value();
  out.raw = std::move(call.raw);
  if (out.flagged) spdlog::warn("error classification unparsable for '{}'", request_tag);
  return out;
}

void to_json(Json& j, const TaxonomyRecord& v) {
  j = Json{{"sample_id", v.sample_id},
           {"candidate_model", v.candidate_model},
           {"prompt_kind", ToString(v.prompt_kind)},
           {"label", v.label},
           {"category", ToString(v.category)},
           {"flagged", v.flagged},
           {"raw", v.raw}};
}

void from_json(const Json& j, TaxonomyRecord& v) {
  v.sample_id = j.at("sample_id").get<std::string>();
  v.candidate_model = j.at("candidate_model").get<std::string>();
  v.prompt_kind = FromString<PromptKind>(j.at("prompt_kind").get<std::string>());
  v.label = j.at("label").get<double>();
  v.category = FromString<ErrorCategory>(j.at("category").get<std::string>());
  v.flagged = j.value("flagged", false);
  v.raw = j.value("raw", "");
}

std::vector<TaxonomyRecord> ClassifyExplanationErrors(
    Gateway& gateway, const TemplateLibrary& library, const std::vector<BenchmarkSample>& samples,
    const std::map<std::string, DocumentRecord>& documents,
    const std::vector<DetectionResponse>& responses, const std::vector<JudgmentRecord>& judgments,
    const JudgeConfig& config) {
  std::map<std::string, const BenchmarkSample*> sample_of;
  for (const auto& s : samples) sample_of.emplace(s.sample_id, &s);
  std::map<std::tuple<std::string, std::string, PromptKind>, const DetectionResponse*> response_of;
  for (const auto& r : responses) response_of.emplace(std::tuple{r.sample_id, r.model, r.prompt_kind}, &r);

  struct Task {
    const JudgmentRecord* judgment;
    const BenchmarkSample* sample;
    const DocumentRecord* document;
    const DetectionResponse* response;
  };
  std::vector<Task> tasks;
  for (const auto& j : judgments) {
    if (j.label >= 1.0) continue;
    const auto s = sample_of.find(j.sample_id);
    const auto r = response_of.find(std::tuple{j.sample_id, j.candidate_model, j.prompt_kind});
    if (s == sample_of.end() || r == response_of.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "judgment for " + j.sample_id + " has no matching sample or response");
    }
    if (r->second->verdict == Verdict::kUnparsable) continue;
    const auto d = documents.find(s->second->doc_id);
    if (d == documents.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown doc_id '" + s->second->doc_id + "'");
    }
    tasks.push_back({&j, s->second, &d->second, r->second});
  }

  return ParallelMap(tasks.size(), config.concurrency, [&](std::size_t i) {
    const Task& t = tasks[i];
    const std::string tag = "taxonomy:" + std::string(ToString(t.judgment->prompt_kind)) + ":" +
                            t.judgment->candidate_model + ":" + t.judgment->sample_id;
    TaxonomyOutcome o = ClassifyExplanationError(gateway, library, *t.sample, *t.document,
                                                 t.response->explanation.value_or(""), config, tag);
    return TaxonomyRecord{t.judgment->sample_id, t.judgment->candidate_model,
                          t.judgment->prompt_kind, t.judgment->label, o.category, o.flagged,
                          o.raw.empty() ? std::string{} : o.raw.back()};
  });
}

}  // namespace execedit
