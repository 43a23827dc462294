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

#include <string>
#include <utility>
#include <vector>

#include "execedit/gateway.hpp"
#include "execedit/model.hpp"
#include "execedit/prompt_template.hpp"

namespace execedit {

struct ClassifierConfig {
  std::string backend;
  std::string model;
  double temperature = kEvaluationTemperature;
  int max_tokens = 256;
  int concurrency = 1;
};

struct ClassificationOutcome {
  ExecutableEdit edit;  // triviality set to `category`
  TrivialityCategory category = TrivialityCategory::kOther;
  bool flagged = false;  // classifier reply unparsable after the re-ask
  std::string warning;   // e.g. unknown category string
  std::vector<std::string> raw;
};

ClassificationOutcome ClassifyEdit(Gateway& gateway, const TemplateLibrary& library,
                                   const ExecutableEdit& edit,
                                   const ClassifierConfig& config);

std::vector<ClassificationOutcome> ClassifyEdits(Gateway& gateway,
                                                 const TemplateLibrary& library,
                                                 const std::vector<ExecutableEdit>& edits,
                                                 const ClassifierConfig& config);

// Parses a classifier reply: {"category": ...}, case-insensitive on the four
// names. Unknown strings map to kOther and set `warning`. Throws kUnparsable
// when the reply holds no JSON object.
TrivialityCategory ParseTrivialityCategory(std::string_view raw, std::string* warning);

// Keeps exactly the kOther edits, in input order.
std::vector<ExecutableEdit> FilterTrivial(
    const std::vector<std::pair<ExecutableEdit, TrivialityCategory>>& classified);

struct TrivialityAuditRecord {
  std::string edit_id;
  TrivialityCategory category = TrivialityCategory::kOther;
  bool kept = true;
  bool flagged = false;
  std::string warning;
  std::string raw;
};

TrivialityAuditRecord ToAuditRecord(const ClassificationOutcome& outcome);
void to_json(Json& j, const TrivialityAuditRecord& v);
void from_json(const Json& j, TrivialityAuditRecord& v);

}  // namespace execedit
