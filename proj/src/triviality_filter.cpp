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

#include "execedit/triviality_filter.hpp"

#include <spdlog/spdlog.h>

#include "execedit/error.hpp"
#include "execedit/json_extract.hpp"
#include "execedit/parallel.hpp"
#include "execedit/text.hpp"

namespace execedit {

TrivialityCategory ParseTrivialityCategory(std::string_view raw, std::string* warning) {
  const Json obj = ExtractJsonObject(raw);
  const auto it = obj.find("category");
  if (it == obj.end() || !it->is_string()) {
    if (warning) *warning = "reply has no string \"category\"; treated as OTHER";
    return TrivialityCategory::kOther;
  }
  const std::string value = Trim(it->get<std::string>());
  try {
    return FromString<TrivialityCategory>(value);
  } catch (const Error&) {
    if (warning) *warning = "unknown category '" + value + "'; treated as OTHER";
    return TrivialityCategory::kOther;
  }
}

ClassificationOutcome ClassifyEdit(Gateway& gateway, const TemplateLibrary& library,
                                   const ExecutableEdit& edit, const ClassifierConfig& config) {
  const std::string prompt = RenderTemplate(library.Get(templates::kClassifyTrivial),
                                            {{"OG_TEXT", edit.original_text},
                                             {"REP_TEXT", edit.replace_text},
                                             {"EXPLAINATION", edit.explanation}});
  const CompletionRequest request{config.backend, prompt, config.temperature, config.max_tokens,
                                  "classify:" + edit.edit_id};
  JsonCallResult call = CompleteJson(gateway, request, /*reask=*/true);

  ClassificationOutcome out;
  out.edit = edit;
  out.raw = call.raw;
  if (call.value) {
    out.category = ParseTrivialityCategory(call.value->dump(), &out.warning);
  } else {
    out.flagged = true;
    out.warning = call.failure ? call.failure->what() : "classifier reply unparsable after re-ask";
  }
  if (!out.warning.empty()) spdlog::warn("edit {}: {}", edit.edit_id, out.warning);
  out.edit.triviality = out.category;
  return out;
}

std::vector<ClassificationOutcome> ClassifyEdits(Gateway& gateway, const TemplateLibrary& library,
                                                 const std::vector<ExecutableEdit>& edits,
                                                 const ClassifierConfig& config) {
  return ParallelMap(edits.size(), config.concurrency, [&](std::size_t i) {
    return ClassifyEdit(gateway, library, edits[i], config);
  });
}

std::vector<ExecutableEdit> FilterTrivial(
    const std::vector<std::pair<ExecutableEdit, TrivialityCategory>>& classified) {
  std::vector<ExecutableEdit> kept;
  for (const auto& [edit, category] : classified) {
    if (category == TrivialityCategory::kOther) kept.push_back(edit);
  }
  return kept;
}

TrivialityAuditRecord ToAuditRecord(const ClassificationOutcome& outcome) {
  TrivialityAuditRecord r;
  r.edit_id = outcome.edit.edit_id;
  r.category = outcome.category;
  r.kept = outcome.category == TrivialityCategory::kOther;
  r.flagged = outcome.flagged;
  r.warning = outcome.warning;
  r.raw = outcome.raw.empty() ? std::string{} : outcome.raw.back();
  return r;
}

void to_json(Json& j, const TrivialityAuditRecord& v) {
  j = Json{{"edit_id", v.edit_id}, {"category", ToString(v.category)}, {"kept", v.kept},
           {"flagged", v.flagged},  {"warning", v.warning},              {"raw", v.raw}};
}

void from_json(const Json& j, TrivialityAuditRecord& v) {
  v.edit_id = j.at("edit_id").get<std::string>();
  v.category = FromString<TrivialityCategory>(j.at("category").get<std::string>());
  v.kept = j.value("kept", v.category == TrivialityCategory::kOther);
  v.flagged = j.value("flagged", false);
  v.warning = j.value("warning", "");
  v.raw = j.value("raw", "");
}

}  // namespace execedit
