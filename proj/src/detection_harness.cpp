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

#include "execedit/detection_harness.hpp"

#include <spdlog/spdlog.h>

#include "execedit/error.hpp"
#include "execedit/json_extract.hpp"
#include "execedit/parallel.hpp"
#include "execedit/text.hpp"

namespace execedit {
namespace {

std::string ExplanationField(const Json& obj) {
  const auto it = obj.find("explanation");
  if (it == obj.end() || it->is_null()) return {};
  return it->is_string() ? it->get<std::string>() : it->dump();
}

}  // namespace

ParsedDetection ParseDetectionResponse(std::string_view raw, PromptKind kind) {
  ParsedDetection out;
  const auto obj = TryExtractJsonObject(raw);
  if (!obj) return out;
  if (kind == PromptKind::kExplainGivenDetection) {
    out.verdict = Verdict::kInconsistent;
    out.explanation = ExplanationField(*obj);
    return out;
  }
  const auto it = obj->find("consistent");
  if (it == obj->end() || !it->is_string()) return out;
  const std::string answer = ToLowerAscii(Trim(it->get<std::string>()));
  if (answer == "yes") {
    out.verdict = Verdict::kConsistent;
  } else if (answer == "no") {
    out.verdict = Verdict::kInconsistent;
    out.explanation = ExplanationField(*obj);
  }
  return out;
}

const PromptTemplate& DetectionTemplate(const TemplateLibrary& library, PromptKind kind) {
  return library.Get(kind == PromptKind::kDetectAndExplain ? templates::kDetectAndExplain
                                                           : templates::kExplainGivenDetection);
}

std::vector<const BenchmarkSample*> SubmittedSamples(const std::vector<BenchmarkSample>& samples,
                                                     PromptKind kind) {
  std::vector<const BenchmarkSample*> out;
  for (const auto& s : samples) {
    if (kind == PromptKind::kDetectAndExplain || s.label == Label::kInconsistent) {
      out.push_back(&s);
    }
  }
  return out;
}

std::vector<DetectionResponse> EvaluateDetection(
    Gateway& gateway, const TemplateLibrary& library, const std::vector<BenchmarkSample>& samples,
    const std::map<std::string, DocumentRecord>& documents, PromptKind kind,
    const DetectionConfig& config) {
  const PromptTemplate& tmpl = DetectionTemplate(library, kind);
  const std::vector<const BenchmarkSample*> submitted = SubmittedSamples(samples, kind);
  for (const BenchmarkSample* s : submitted) {
    if (!documents.contains(s->doc_id)) {
      throw Error(ErrorCode::kInvalidArgument, "sample " + s->sample_id + " references unknown doc_id '" +
                                                   s->doc_id + "'");
    }
  }
  const std::string tag_prefix = "detect:" + std::string(ToString(kind)) + ":";
  return ParallelMap(submitted.size(), config.concurrency, [&](std::size_t i) {
    const BenchmarkSample& sample = *submitted[i];
    DetectionResponse r;
    r.sample_id = sample.sample_id;
    r.model = config.model;
    r.prompt_kind = kind;
    const std::string prompt = RenderTemplate(
        tmpl, {{"DOCUMENT", documents.at(sample.doc_id).text}, {"SUMMARY", sample.summary_text}});
    try {
      r.raw = gateway
                  .Complete({config.backend, prompt, config.temperature, config.max_tokens,
                             tag_prefix + sample.sample_id})
                  .text;
    } catch (const Error& e) {
      spdlog::warn("detection call for {} failed: {}", sample.sample_id, e.what());
      r.verdict = Verdict::kUnparsable;
      return r;
    }
    ParsedDetection parsed = ParseDetectionResponse(r.raw, kind);
    r.verdict = parsed.verdict;
    r.explanation = std::move(parsed.explanation);
    return r;
  });
}

}  // namespace execedit
