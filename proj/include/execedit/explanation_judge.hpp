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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "execedit/gateway.hpp"
#include "execedit/model.hpp"
#include "execedit/prompt_template.hpp"

namespace execedit {

// Inputs the judge sees. Which optional fields are set is fixed per variant:
//   V1 document + edited summary
//   V2 seed summary + edited summary
//   V3 seed summary + edited summary + reference explanation
//   V4 reference explanation only
struct JudgeContext {
  JudgeVariant variant = JudgeVariant::kV4;
  std::optional<std::string> document;
  std::optional<std::string> seed_summary;
  std::optional<std::string> edited_summary;
  std::optional<std::string> reference_explanation;
  std::string candidate_explanation;
};

std::vector<std::string> JudgeContextViolations(const JudgeContext& ctx);

// Context for `variant` carrying only the fields that variant allows.
JudgeContext MakeJudgeContext(JudgeVariant variant, const BenchmarkSample& sample,
                              const DocumentRecord& document, const SeedSummary& seed,
                              std::string candidate_explanation);

std::string_view JudgeTemplateName(JudgeVariant variant);

// kPrecondition when the context breaks its variant's field discipline.
std::string RenderJudgePrompt(const TemplateLibrary& library, const JudgeContext& ctx);

// {"label": ...} with entirely_correct / partially_correct / not_correct (any
// case) or "1" / "0.5" / "0" (strings or numbers). kUnparsable otherwise.
LabelValue ParseJudgeLabel(std::string_view raw);

struct JudgeConfig {
  std::string backend;
  std::string judge_model;
  double temperature = kEvaluationTemperature;
  int max_tokens = 256;
  int concurrency = 1;
};

struct JudgeOutcome {
  JudgeLabel label;
  bool flagged = false;  // unparsable after the re-ask; label defaulted to 0
  std::vector<std::string> raw;
};

JudgeOutcome JudgeExplanation(Gateway& gateway, const TemplateLibrary& library,
                              const JudgeContext& ctx, const JudgeConfig& config,
                              const std::string& request_tag = {});

// Judges every explanation that enters ES: for D&E, inconsistent samples the
// candidate flagged inconsistent; for E|D, every response. E|D responses
// that were unparsable are scored 0 and flagged without a judge call.
std::vector<JudgmentRecord> JudgeResponses(
    Gateway& gateway, const TemplateLibrary& library,
    const std::vector<BenchmarkSample>& samples,
    const std::map<std::string, DocumentRecord>& documents,
    const std::map<std::string, SeedSummary>& seeds,
    const std::vector<DetectionResponse>& responses, JudgeVariant variant,
    const JudgeConfig& config);

}  // namespace execedit
