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

#include "execedit/edit_synthesis.hpp"

#include <set>
#include <utility>

#include <spdlog/spdlog.h>

#include "execedit/error.hpp"
#include "execedit/hash.hpp"
#include "execedit/text.hpp"

namespace execedit {
namespace {

std::string StringField(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

bool HasAnyKey(const Json& obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (obj.contains(k)) return true;
  }
  return false;
}

}  // namespace

std::string_view ToString(EditStatus s) {
  switch (s) {
    case EditStatus::kValid: return "valid";
    case EditStatus::kSubstringMissing: return "substring_missing";
    case EditStatus::kIdentityEdit: return "identity_edit";
    case EditStatus::kEmptyField: return "empty_field";
  }
  return "?";
}

GenerationResult GenerateEdits(Gateway& gateway, const TemplateLibrary& library,
                               const DocumentRecord& document, const SeedSummary& seed,
                               EditMode mode, const GenerationConfig& config) {
  const PromptTemplate& tmpl = library.Get(
      mode == EditMode::kExecutable ? templates::kExecEdit : templates::kNonExecEdit);
  const std::string prompt =
      RenderTemplate(tmpl, {{"DOCUMENT", document.text}, {"SUMMARY", seed.text}});

  GenerationResult result;
  result.transcript = GenerationTranscript{document.doc_id, seed.summary_id, mode,
                                           config.model, tmpl.name(), Sha256Hex(prompt), {}, false};
  auto event = [&](std::string kind, std::string detail) {
    result.events.push_back(
        GenerationEvent{document.doc_id, seed.summary_id, std::move(kind), std::move(detail)});
  };

  const CompletionRequest request{config.backend, prompt, config.temperature, config.max_tokens,
                                  "generate:" + std::string(ToString(mode)) + ":" +
                                      document.doc_id + ":" + seed.summary_id};
  JsonCallResult call = CompleteJson(gateway, request, /*reask=*/true);
  result.transcript.replies = call.raw;
  result.transcript.reasked = call.reasked;

  if (!call.value) {
    event("generation_failure", call.failure ? call.failure->what() : "unparsable reply after re-ask");
    spdlog::warn("edit generation failed for ({}, {})", document.doc_id, seed.summary_id);
    return result;
  }
  const auto edits = call.value->find("edits");
  if (edits == call.value->end() || !edits->is_array()) {
    event("generation_failure", "reply has no \"edits\" array");
    return result;
  }

  std::size_t taken = 0;
  for (const Json& e : *edits) {
    if (taken == kEditsPerPair) {
      event("extra_edits", std::to_string(edits->size()) + " edits returned, kept the first " +
                               std::to_string(kEditsPerPair));
      break;
    }
    if (!e.is_object()) {
      event("malformed_edit", e.dump());
      continue;
    }
    if (mode == EditMode::kExecutable) {
      if (!HasAnyKey(e, {"original_text", "replace_text"})) {
        event("malformed_edit", e.dump());
        continue;
      }
      ExecutableEdit edit;
      edit.doc_id = document.doc_id;
      edit.summary_id = seed.summary_id;
      edit.original_text = NormalizeNfc(StringField(e, "original_text"));
      edit.replace_text = NormalizeNfc(StringField(e, "replace_text"));
      edit.explanation = StringField(e, "explanation");
      edit.generator_model = config.model;
      edit.edit_id = MakeEditId(edit.doc_id, edit.original_text, edit.replace_text, edit.generator_model);
      result.executable.push_back(std::move(edit));
    } else {
      if (!e.contains("edited_summary")) {
        event("malformed_edit", e.dump());
        continue;
      }
      NonExecutableEdit edit;
      edit.doc_id = document.doc_id;
      edit.summary_id = seed.summary_id;
      edit.edited_summary = NormalizeNfc(StringField(e, "edited_summary"));
      edit.explanation = StringField(e, "explanation");
      edit.generator_model = config.model;
      if (edit.edited_summary.empty() || edit.edited_summary == seed.text) {
        event("invalid_edit", "edited_summary empty or identical to the seed");
        continue;
      }
      edit.edit_id = ContentId({edit.doc_id, edit.edited_summary, edit.generator_model});
      result.non_executable.push_back(std::move(edit));
    }
    ++taken;
  }
  if (taken < kEditsPerPair) {
    event("short_output", std::to_string(taken) + " of " + std::to_string(kEditsPerPair) + " edits");
    spdlog::info("({}, {}): generator returned {} edits", document.doc_id, seed.summary_id, taken);
  }
  return result;
}

EditValidationOutcome ValidateEdit(const SeedSummary& seed, const ExecutableEdit& edit) {
  EditValidationOutcome out{edit, EditStatus::kValid,
                            CountOccurrences(seed.text, edit.original_text)};
  if (edit.original_text.empty() || edit.replace_text.empty() || edit.explanation.empty()) {
    out.status = EditStatus::kEmptyField;
  } else if (edit.original_text == edit.replace_text) {
    out.status = EditStatus::kIdentityEdit;
  } else if (out.occurrence_count == 0) {
    out.status = EditStatus::kSubstringMissing;
  }
  return out;
}

std::string ApplyEdit(const SeedSummary& seed, const ExecutableEdit& edit) {
  const EditValidationOutcome v = ValidateEdit(seed, edit);
  if (v.status != EditStatus::kValid) {
    throw Error(ErrorCode::kInvalidEdit, "edit " + edit.edit_id + ": " + std::string(ToString(v.status)));
  }
  std::string out = seed.text;
  out.replace(out.find(edit.original_text), edit.original_text.size(), edit.replace_text);
  return out;
}

std::vector<ExecutableEdit> DedupeEdits(const std::vector<ExecutableEdit>& edits) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<ExecutableEdit> out;
  for (const auto& e : edits) {
    if (seen.emplace(e.original_text, e.replace_text).second) out.push_back(e);
  }
  return out;
}

PreparedEdits PrepareEdits(const SeedSummary& seed, const std::vector<ExecutableEdit>& raw_edits) {
  PreparedEdits out;
  std::vector<ExecutableEdit> valid;
  for (const auto& edit : raw_edits) {
    const EditValidationOutcome v = ValidateEdit(seed, edit);
    if (v.status != EditStatus::kValid) {
      out.events.push_back({seed.doc_id, seed.summary_id, "invalid_edit",
                            edit.edit_id + " " + std::string(ToString(v.status))});
      continue;
    }
    if (v.occurrence_count > 1) {
      out.events.push_back({seed.doc_id, seed.summary_id, "multi_occurrence",
                            edit.edit_id + " occurs " + std::to_string(v.occurrence_count) +
                                " times; first occurrence replaced"});
    }
    valid.push_back(edit);
  }
  out.edits = DedupeEdits(valid);
  if (out.edits.size() < valid.size()) {
    out.events.push_back({seed.doc_id, seed.summary_id, "duplicate_edit",
                          std::to_string(valid.size() - out.edits.size()) + " duplicates removed"});
  }
  return out;
}

EditSpan SpanOf(const SeedSummary& seed, const ExecutableEdit& edit) {
  const std::size_t at = seed.text.find(edit.original_text);
  if (edit.original_text.empty() || at == std::string::npos) {
    throw Error(ErrorCode::kInvalidEdit, "original_text not in seed summary");
  }
  return EditSpan{at, edit.original_text.size(), at, edit.replace_text.size()};
}

EditSpan DiffSpan(std::string_view seed_text, std::string_view edited_text) {
  std::size_t prefix = 0;
  const std::size_t limit = std::min(seed_text.size(), edited_text.size());
  while (prefix < limit && seed_text[prefix] == edited_text[prefix]) ++prefix;
  // Keep the span on a UTF-8 boundary.
  while (prefix > 0 && (static_cast<unsigned char>(seed_text[prefix]) & 0xC0) == 0x80) --prefix;
  std::size_t suffix = 0;
  while (suffix < limit - prefix &&
         seed_text[seed_text.size() - 1 - suffix] == edited_text[edited_text.size() - 1 - suffix]) {
    ++suffix;
  }
  while (suffix > 0 &&
         (static_cast<unsigned char>(seed_text[seed_text.size() - suffix]) & 0xC0) == 0x80) {
    --suffix;
  }
  return EditSpan{prefix, seed_text.size() - prefix - suffix, prefix,
                  edited_text.size() - prefix - suffix};
}

}  // namespace execedit
