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
#include <string>
#include <vector>

#include "execedit/explanation_judge.hpp"
#include "execedit/gateway.hpp"
#include "execedit/model.hpp"
#include "execedit/prompt_template.hpp"

namespace execedit {

struct TaxonomyOutcome {
  ErrorCategory category = ErrorCategory::kVague;
  bool flagged = false;  // unparsable after the re-ask; defaulted to VAGUE
  std::vector<std::string> raw;
};

// {"category": ...} with the four category names, any case. kUnparsable
// otherwise.
ErrorCategory ParseErrorCategory(std::string_view raw);

TaxonomyOutcome ClassifyExplanationError(Gateway& gateway, const TemplateLibrary& library,
                                         const BenchmarkSample& sample,
                                         const DocumentRecord& document,
                                         const std::string& candidate_explanation,
                                         const JudgeConfig& config,
                                         const std::string& request_tag = {});

struct TaxonomyRecord {
  std::string sample_id;
  std::string candidate_model;
  PromptKind prompt_kind = PromptKind::kDetectAndExplain;
  double label = 0.0;
  ErrorCategory category = ErrorCategory::kVague;
  bool flagged = false;
  std::string raw;
};

void to_json(Json& j, const TaxonomyRecord& v);
void from_json(const Json& j, TaxonomyRecord& v);

// Classifies every judged explanation with a label below 1.
std::vector<TaxonomyRecord> ClassifyExplanationErrors(
    Gateway& gateway, const TemplateLibrary& library,
    const std::vector<BenchmarkSample>& samples,
    const std::map<std::string, DocumentRecord>& documents,
    const std::vector<DetectionResponse>& responses,
    const std::vector<JudgmentRecord>& judgments, const JudgeConfig& config);

}  // namespace execedit
