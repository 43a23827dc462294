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

#include "execedit/explanation_judge.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "execedit/error.hpp"
#include "execedit/json_extract.hpp"
#include "execedit/parallel.hpp"
#include "execedit/text.hpp"

namespace execedit {

std::vector<std::string> JudgeContextViolations(const JudgeContext& ctx) {
  std::vector<std::string> v;
  auto need = [&](const std::optional<std::string>& f, const char* name) {
    if (!f) v.push_back(std::string(ToString(ctx.variant)) + " requires " + name);
  };
  auto forbid = [&](const std::optional<std::string>& f, const char* name) {
    if (f) v.push_back(std::string(ToString(ctx.variant)) + " must not carry " + name);
  };
  switch (ctx.variant) {
    case JudgeVariant::kV1:
      need(ctx.document, "document");
      need(ctx.edited_summary, "edited_summary");
      forbid(ctx.seed_summary, "seed_summary");
      forbid(ctx.reference_explanation, "reference_explanation");
      break;
    case JudgeVariant::kV2:
      need(ctx.seed_summary, "seed_summary");
      need(ctx.edited_summary, "edited_summary");
      forbid(ctx.document, "document");
      forbid(ctx.reference_explanation, "reference_explanation");
      break;
    case JudgeVariant::kV3:
      need(ctx.seed_summary, "seed_summary");
      need(ctx.edited_summary, "edited_summary");
      need(ctx.reference_explanation, "reference_explanation");
      forbid(ctx.document, "document");
      break;
    case JudgeVariant::kV4:
      need(ctx.reference_explanation, "reference_explanation");
      forbid(ctx.document, "document");
      forbid(ctx.seed_summary, "seed_summary");
      forbid(ctx.edited_summary, "edited_summary");
      break;
  }
  return v;
}

JudgeContext MakeJudgeContext(JudgeVariant variant, const BenchmarkSample& sample,
                              const DocumentRecord& document, const SeedSummary& seed,
                              std::string candidate_explanation) {
  JudgeContext ctx;
  ctx.variant = variant;
  ctx.candidate_explanation = std::move(candidate_explanation);
  const std::string reference = sample.reference_explanation.value_or("");
  switch (variant) {
    case JudgeVariant::kV1:
      ctx.document = document.text;
      ctx.edited_summary = sample.summary_text;
      break;
    case JudgeVariant::kV2:
      ctx.seed_summary = seed.text;
      ctx.edited_summary = sample.summary_text;
      break;
    case JudgeVariant::kV3:
      ctx.seed_summary = seed.text;
      ctx.edited_summary = sample.summary_text;
      ctx.reference_explanation = reference;
      break;
    case JudgeVariant::kV4:
      ctx.reference_explanation = reference;
      break;
  }
  return ctx;
}

std::string_view JudgeTemplateName(JudgeVariant variant) {
  switch (variant) {
    case JudgeVariant::kV1: return templates::kJudgeV1;
    case JudgeVariant::kV2: return templates::kJudgeV2;
    case JudgeVariant::kV3: return templates::kJudgeV3;
    case JudgeVariant::kV4: return templates::kJudgeV4;
  }
  return templates::kJudgeV4;
}

std::string RenderJudgePrompt(const TemplateLibrary& library, const JudgeContext& ctx) {
  const auto violations = JudgeContextViolations(ctx);
  if (!violations.empty()) throw Error(ErrorCode::kPrecondition, violations.front());
  Bindings b{{"EXPLANATION", ctx.candidate_explanation}};
  if (ctx.document) b["DOCUMENT"] = *ctx.document;
  if (ctx.seed_summary) b["SEED_SUMMARY"] = *ctx.seed_summary;
  if (ctx.edited_summary) b["SUMMARY"] = *ctx.edited_summary;
  if (ctx.reference_explanation) b["REFERENCE_EXPLANATION"] = *ctx.reference_explanation;
  return RenderTemplate(library.Get(JudgeTemplateName(ctx.variant)), b);
}

LabelValue ParseJudgeLabel(std::string_view raw) {
  const Json obj = ExtractJsonObject(raw);
  const auto it = obj.find("label");
  if (it == obj.end()) throw Error(ErrorCode::kUnparsable, "reply has no \"label\"");
  if (it->is_number()) {
    const double v = it->get<double>();
    if (v == 0.0 || v == 0.5 || v == 1.0) return LabelValue(v);
    throw Error(ErrorCode::kUnparsable, "label " + it->dump() + " is not a level");
  }
  if (!it->is_string()) throw Error(ErrorCode::kUnparsable, "label is not a string");
  const std::string s = ToLowerAscii(Trim(it->get<std::string>()));
  if (s == "entirely_correct" || s == "1") return LabelValue(1.0);
  if (s == "partially_correct" || s == "0.5") return LabelValue(0.5);
  if (s == "not_correct" || s == "0") return LabelValue(0.0);
  throw Error(ErrorCode::kUnparsable, "unknown label '" + s + "'");
}

JudgeOutcome JudgeExplanation(Gateway& gateway, const TemplateLibrary& library,
                              const JudgeContext& ctx, const JudgeConfig& config,
                              const std::string& request_tag) {
  const std::string prompt = RenderJudgePrompt(library, ctx);
  auto call = CompleteParsed(gateway,
                             {config.backend, prompt, config.temperature, config.max_tokens,
                              request_tag},
                             [](const std::string& raw) { return ParseJudgeLabel(raw); });
  JudgeOutcome out;
  out.label = JudgeLabel{call.value.value_or(LabelValue(0.0)), ctx.variant, config.judge_model};
  out.flagged = !call.value.has_value();
  out.raw = std::move(call.raw);
  if (out.flagged) {
    spdlog::warn("judge reply unparsable for '{}'{}", request_tag,
                 call.failure ? std::string(": ") + call.failure->what() : std::string{});
  }
  return out;
}

std::vector<JudgmentRecord> JudgeResponses(
    Gateway& gateway, const TemplateLibrary& library, const std::vector<BenchmarkSample>& samples,
    const std::map<std::string, DocumentRecord>& documents,
    const std::map<std::string, SeedSummary>& seeds,
    const std::vector<DetectionResponse>& responses, JudgeVariant variant,
    const JudgeConfig& config) {
  std::map<std::string, const BenchmarkSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.sample_id, &s);

  struct Task {
    const DetectionResponse* response;
    const BenchmarkSample* sample;
  };
  std::vector<Task> tasks;
  for (const auto& r : responses) {
    const auto it = by_id.find(r.sample_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvalidArgument, "response for unknown sample " + r.sample_id);
    }
    const BenchmarkSample& s = *it->second;
    if (s.label != Label::kInconsistent) continue;
    if (r.prompt_kind == PromptKind::kDetectAndExplain && r.verdict != Verdict::kInconsistent) {
      continue;
    }
    tasks.push_back({&r, &s});
  }

  return ParallelMap(tasks.size(), config.concurrency, [&](std::size_t i) {
    const DetectionResponse& r = *tasks[i].response;
    const BenchmarkSample& s = *tasks[i].sample;
    JudgmentRecord rec{s.sample_id, r.model, r.prompt_kind, variant, config.judge_model,
                       0.0,         false,   {}};
    if (r.verdict == Verdict::kUnparsable) {
      rec.flagged = true;
      return rec;
    }
    const auto doc = documents.find(s.doc_id);
    const auto seed = seeds.find(s.summary_id);
    if (doc == documents.end() || seed == seeds.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample " + s.sample_id + " lacks its document or seed summary");
    }
    const JudgeContext ctx =
        MakeJudgeContext(variant, s, doc->second, seed->second, r.explanation.value_or(""));
    const std::string tag = "judge:" + std::string(ToString(variant)) + ":" +
                            std::string(ToString(r.prompt_kind)) + ":" + r.model + ":" + s.sample_id;
    JudgeOutcome outcome = JudgeExplanation(gateway, library, ctx, config, tag);
    rec.label = outcome.label.value.value();
    rec.flagged = outcome.flagged;
    rec.raw = outcome.raw.empty() ? std::string{} : outcome.raw.back();
    return rec;
  });
}

}  // namespace execedit
