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

// Edit generation with the executable and non-executable prompts, edit
// validation against the seed summary, substring execution, and dedupe.

#include <cstddef>
#include <string>
#include <vector>

#include "execedit/gateway.hpp"
#include "execedit/model.hpp"
#include "execedit/prompt_template.hpp"

namespace execedit {

inline constexpr std::size_t kEditsPerPair = 6;

struct GenerationConfig {
  std::string backend;
  std::string model;  // recorded as generator_model on every edit
  double temperature = kGenerationTemperature;
  int max_tokens = 2048;
};

struct GenerationEvent {
  std::string doc_id;
  std::string summary_id;
  std::string kind;  // generation_failure, short_output, extra_edits, malformed_edit,
                     // invalid_edit, duplicate_edit, multi_occurrence
  std::string detail;

  friend bool operator==(const GenerationEvent&, const GenerationEvent&) = default;
};

// Raw exchange with the generator, kept for audit.
struct GenerationTranscript {
  std::string doc_id;
  std::string summary_id;
  EditMode mode = EditMode::kExecutable;
  std::string generator_model;
  std::string template_name;
  std::string prompt_hash;
  std::vector<std::string> replies;
  bool reasked = false;
};

struct GenerationResult {
  std::vector<ExecutableEdit> executable;         // kExecutable mode only
  std::vector<NonExecutableEdit> non_executable;  // kNonExecutable mode only
  GenerationTranscript transcript;
  std::vector<GenerationEvent> events;
};

// Renders the mode's template for the pair, calls the generator, and returns
// at most kEditsPerPair edits of the mode's shape. An unparsable reply gets
// one re-ask; if that fails too the result is empty with a
// generation_failure event.
GenerationResult GenerateEdits(Gateway& gateway, const TemplateLibrary& library,
                               const DocumentRecord& document, const SeedSummary& seed,
                               EditMode mode, const GenerationConfig& config);

enum class EditStatus { kValid, kSubstringMissing, kIdentityEdit, kEmptyField };
std::string_view ToString(EditStatus s);

struct EditValidationOutcome {
  ExecutableEdit edit;
  EditStatus status = EditStatus::kValid;
  std::size_t occurrence_count = 0;
};

EditValidationOutcome ValidateEdit(const SeedSummary& seed, const ExecutableEdit& edit);

// seed.text with the first occurrence of original_text replaced. Throws
// kInvalidEdit when ValidateEdit would not report kValid.
std::string ApplyEdit(const SeedSummary& seed, const ExecutableEdit& edit);

// Drops repeats of (original_text, replace_text), keeping first occurrences.
std::vector<ExecutableEdit> DedupeEdits(const std::vector<ExecutableEdit>& edits);

struct PreparedEdits {
  std::vector<ExecutableEdit> edits;
  std::vector<GenerationEvent> events;
};

// Validation (invalid edits dropped, multi-occurrence warned) then dedupe.
PreparedEdits PrepareEdits(const SeedSummary& seed,
                           const std::vector<ExecutableEdit>& raw_edits);

// Where an edit sits in the seed and in the edited summary (byte offsets).
struct EditSpan {
  std::size_t original_begin = 0;
  std::size_t original_length = 0;
  std::size_t replace_begin = 0;
  std::size_t replace_length = 0;

  friend bool operator==(const EditSpan&, const EditSpan&) = default;
};

EditSpan SpanOf(const SeedSummary& seed, const ExecutableEdit& edit);

// Minimal differing region between two texts (common prefix and suffix
// removed); used for rewritten summaries.
EditSpan DiffSpan(std::string_view seed_text, std::string_view edited_text);

}  // namespace execedit
