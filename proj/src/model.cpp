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

#include "execedit/model.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

#include "execedit/error.hpp"
#include "execedit/hash.hpp"
#include "execedit/text.hpp"

namespace execedit {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kMissingBinding: return "MissingBinding";
    case ErrorCode::kUnknownBinding: return "UnknownBinding";
    case ErrorCode::kUnknownTemplate: return "UnknownTemplate";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kRetriesExhausted: return "RetriesExhausted";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kUnparsable: return "Unparsable";
    case ErrorCode::kInvalidEdit: return "InvalidEdit";
    case ErrorCode::kInsufficientConsistentPool: return "InsufficientConsistentPool";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kConstantVector: return "ConstantVector";
    case ErrorCode::kGatingViolation: return "GatingViolation";
    case ErrorCode::kUnknownItem: return "UnknownItem";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kEmptySource: return "EmptySource";
    case ErrorCode::kEmptyOverlap: return "EmptyOverlap";
    case ErrorCode::kPrecondition: return "Precondition";
  }
  return "Unknown";
}

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<TrivialityCategory, 4> kTrivialityNames{{
    {TrivialityCategory::kDateChange, "DATE_CHANGE"},
    {TrivialityCategory::kNumberChange, "NUMBER_CHANGE"},
    {TrivialityCategory::kAntonymChange, "ANTONYM_CHANGE"},
    {TrivialityCategory::kOther, "OTHER"},
}};
constexpr NameTable<Label, 2> kLabelNames{{
    {Label::kConsistent, "consistent"},
    {Label::kInconsistent, "inconsistent"},
}};
constexpr NameTable<Verdict, 3> kVerdictNames{{
    {Verdict::kConsistent, "consistent"},
    {Verdict::kInconsistent, "inconsistent"},
    {Verdict::kUnparsable, "unparsable"},
}};
constexpr NameTable<PromptKind, 2> kPromptKindNames{{
    {PromptKind::kDetectAndExplain, "D_AND_E"},
    {PromptKind::kExplainGivenDetection, "E_GIVEN_D"},
}};
constexpr NameTable<JudgeVariant, 4> kVariantNames{{
    {JudgeVariant::kV1, "V1"},
    {JudgeVariant::kV2, "V2"},
    {JudgeVariant::kV3, "V3"},
    {JudgeVariant::kV4, "V4"},
}};
constexpr NameTable<AnnotationKind, 2> kAnnotationKindNames{{
    {AnnotationKind::kEditQuality, "edit_quality"},
    {AnnotationKind::kExplanationLabel, "explanation_label"},
}};
constexpr NameTable<Answer, 2> kAnswerNames{{
    {Answer::kYes, "yes"},
    {Answer::kNo, "no"},
}};
constexpr NameTable<ErrorCategory, 4> kErrorCategoryNames{{
    {ErrorCategory::kMisattribution, "MISATTRIBUTION"},
    {ErrorCategory::kAdditionalIrrelevant, "ADDITIONAL_IRRELEVANT"},
    {ErrorCategory::kCompletenessFocus, "COMPLETENESS_FOCUS"},
    {ErrorCategory::kVague, "VAGUE"},
}};
constexpr NameTable<EditMode, 2> kEditModeNames{{
    {EditMode::kExecutable, "executable"},
    {EditMode::kNonExecutable, "non_executable"},
}};
constexpr NameTable<Question, 4> kQuestionNames{{
    {Question::kInconsistent, "inconsistent"},
    {Question::kComplex, "complex"},
    {Question::kControlled, "controlled"},
    {Question::kExplanation, "explanation"},
}};

template <typename E, std::size_t N>
std::string_view Lookup(const NameTable<E, N>& table, E v) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
E Parse(const NameTable<E, N>& table, std::string_view s, bool any_case,
        std::string_view what) {
  const std::string key = any_case ? ToLowerAscii(s) : std::string(s);
  for (const auto& [e, name] : table) {
    if ((any_case ? ToLowerAscii(name) : std::string(name)) == key) return e;
  }
  throw Error(ErrorCode::kParse, "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

}  // namespace

std::string_view ToString(TrivialityCategory v) { return Lookup(kTrivialityNames, v); }
std::string_view ToString(Label v) { return Lookup(kLabelNames, v); }
std::string_view ToString(Verdict v) { return Lookup(kVerdictNames, v); }
std::string_view ToString(PromptKind v) { return Lookup(kPromptKindNames, v); }
std::string_view ToString(JudgeVariant v) { return Lookup(kVariantNames, v); }
std::string_view ToString(AnnotationKind v) { return Lookup(kAnnotationKindNames, v); }
std::string_view ToString(Answer v) { return Lookup(kAnswerNames, v); }
std::string_view ToString(ErrorCategory v) { return Lookup(kErrorCategoryNames, v); }
std::string_view ToString(EditMode v) { return Lookup(kEditModeNames, v); }
std::string_view ToString(Question v) { return Lookup(kQuestionNames, v); }

template <>
TrivialityCategory FromString<TrivialityCategory>(std::string_view s) {
  return Parse(kTrivialityNames, s, true, "triviality category");
}
template <>
Label FromString<Label>(std::string_view s) {
  return Parse(kLabelNames, s, false, "label");
}
template <>
Verdict FromString<Verdict>(std::string_view s) {
  return Parse(kVerdictNames, s, false, "verdict");
}
template <>
PromptKind FromString<PromptKind>(std::string_view s) {
  return Parse(kPromptKindNames, s, false, "prompt kind");
}
template <>
JudgeVariant FromString<JudgeVariant>(std::string_view s) {
  return Parse(kVariantNames, s, false, "judge variant");
}
template <>
AnnotationKind FromString<AnnotationKind>(std::string_view s) {
  return Parse(kAnnotationKindNames, s, false, "annotation kind");
}
template <>
Answer FromString<Answer>(std::string_view s) {
  return Parse(kAnswerNames, s, false, "answer");
}
template <>
ErrorCategory FromString<ErrorCategory>(std::string_view s) {
  return Parse(kErrorCategoryNames, s, true, "error category");
}
template <>
EditMode FromString<EditMode>(std::string_view s) {
  return Parse(kEditModeNames, s, false, "edit mode");
}
template <>
Question FromString<Question>(std::string_view s) {
  return Parse(kQuestionNames, s, false, "question");
}

LabelValue::LabelValue(double value) : value_(value) {
  if (value != kNotCorrect && value != kPartiallyCorrect && value != kEntirelyCorrect) {
    throw Error(ErrorCode::kInvalidArgument,
                "label must be 0, 0.5 or 1, got " + std::to_string(value));
  }
}

std::string MakeEditId(std::string_view doc_id, std::string_view original_text,
                       std::string_view replace_text, std::string_view generator_model) {
  return ContentId({doc_id, original_text, replace_text, generator_model});
}

const std::optional<Answer>& AnswerFor(const AnnotationRecord& r, Question q) {
  switch (q) {
    case Question::kInconsistent: return r.q_inconsistent;
    case Question::kComplex: return r.q_complex;
    case Question::kControlled: return r.q_controlled;
    case Question::kExplanation: return r.q_explanation;
  }
  return r.q_inconsistent;
}

std::vector<std::string> GatingViolations(const AnnotationRecord& r) {
  std::vector<std::string> out;
  if (r.annotator_id.empty()) out.emplace_back("annotator_id is empty");
  if (r.target_id.empty()) out.emplace_back("target_id is empty");
  if (r.kind == AnnotationKind::kEditQuality) {
    if (r.label) out.emplace_back("edit_quality record carries a label");
    if (!r.q_inconsistent) out.emplace_back("q_inconsistent is unanswered");
    for (std::size_t i = 1; i < std::size(kGatingOrder); ++i) {
      const Question q = kGatingOrder[i];
      const Question parent = kGatingOrder[i - 1];
      if (AnswerFor(r, q) && AnswerFor(r, parent) != Answer::kYes) {
        out.push_back("q_" + std::string(ToString(q)) + " answered but q_" +
                      std::string(ToString(parent)) + " is not yes");
      }
    }
  } else {
    for (Question q : kGatingOrder) {
      if (AnswerFor(r, q)) {
        out.push_back("explanation_label record answers q_" + std::string(ToString(q)));
      }
    }
    if (!r.label) {
      out.emplace_back("explanation_label record has no label");
    } else {
      const double v = *r.label;
      if (v != 0.0 && v != 0.5 && v != 1.0) out.emplace_back("label must be 0, 0.5 or 1");
    }
  }
  return out;
}

ValidationReport ValidateSample(const BenchmarkSample& sample, const SeedSummary& seed) {
  ValidationReport report;
  auto violate = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  if (sample.sample_id.empty()) violate("sample_id is empty");
  if (sample.summary_text.empty()) violate("summary_text is empty");
  if (sample.doc_id != seed.doc_id) violate("doc_id does not match the seed summary");

  const bool inconsistent = sample.label == Label::kInconsistent;
  if (inconsistent != sample.edit.has_value()) {
    violate(inconsistent ? "inconsistent sample has no edit" : "consistent sample carries an edit");
  }
  if (inconsistent != sample.reference_explanation.has_value()) {
    violate(inconsistent ? "inconsistent sample has no reference_explanation"
                         : "consistent sample carries a reference_explanation");
  }
  if (!sample.edit) return report;

  const ExecutableEdit& edit = *sample.edit;
  if (edit.original_text.empty()) violate("edit original_text is empty");
  if (edit.explanation.empty()) violate("edit explanation is empty");
  if (edit.original_text == edit.replace_text) violate("edit original_text equals replace_text");
  if (sample.reference_explanation && sample.reference_explanation->empty()) {
    violate("reference_explanation is empty");
  }
  const std::size_t at =
      edit.original_text.empty() ? std::string::npos : seed.text.find(edit.original_text);
  if (at == std::string::npos) {
    violate("edit original_text is not a substring of the seed summary");
  } else {
    std::string expected = seed.text;
    expected.replace(at, edit.original_text.size(), edit.replace_text);
    if (expected != sample.summary_text) violate("edit not reflected in summary_text");
  }
  return report;
}

ValidationReport ValidateUniqueIds(const std::vector<BenchmarkSample>& samples) {
  ValidationReport report;
  std::set<std::string> sample_ids;
  std::set<std::string> edit_ids;
  for (const auto& s : samples) {
    if (!sample_ids.insert(s.sample_id).second) {
      report.violations.push_back("duplicate sample_id " + s.sample_id);
    }
    if (s.edit && !edit_ids.insert(s.edit->edit_id).second) {
      report.violations.push_back("duplicate edit_id " + s.edit->edit_id);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

std::string RequireString(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kParse, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

std::string OptionalString(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(ErrorCode::kParse, std::string("field '") + key + "' is not a string");
  return it->get<std::string>();
}

std::optional<std::string> MaybeString(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(ErrorCode::kParse, std::string("field '") + key + "' is not a string");
  return it->get<std::string>();
}

template <typename E>
E RequireEnum(const Json& j, const char* key) {
  return FromString<E>(RequireString(j, key));
}

template <typename E>
std::optional<E> MaybeEnum(const Json& j, const char* key) {
  auto s = MaybeString(j, key);
  if (!s) return std::nullopt;
  return FromString<E>(*s);
}

template <typename E>
void PutEnum(Json& j, const char* key, const std::optional<E>& v) {
  if (v) j[key] = ToString(*v);
}

}  // namespace

void to_json(Json& j, const DocumentRecord& v) {
  j = Json{{"doc_id", v.doc_id}, {"domain", v.domain}, {"text", v.text}};
}

void from_json(const Json& j, DocumentRecord& v) {
  v.doc_id = RequireString(j, "doc_id");
  v.domain = OptionalString(j, "domain");
  v.text = NormalizeNfc(RequireString(j, "text"));
}

void to_json(Json& j, const SeedSummary& v) {
  j = Json{{"summary_id", v.summary_id}, {"doc_id", v.doc_id}, {"text", v.text}};
}

void from_json(const Json& j, SeedSummary& v) {
  v.summary_id = RequireString(j, "summary_id");
  v.doc_id = RequireString(j, "doc_id");
  v.text = NormalizeNfc(RequireString(j, "text"));
}

void to_json(Json& j, const ExecutableEdit& v) {
  j = Json{{"edit_id", v.edit_id},
           {"doc_id", v.doc_id},
           {"summary_id", v.summary_id},
           {"original_text", v.original_text},
           {"replace_text", v.replace_text},
           {"explanation", v.explanation},
           {"generator_model", v.generator_model}};
  PutEnum(j, "triviality", v.triviality);
}

void from_json(const Json& j, ExecutableEdit& v) {
  v.edit_id = RequireString(j, "edit_id");
  v.doc_id = OptionalString(j, "doc_id");
  v.summary_id = OptionalString(j, "summary_id");
  v.original_text = NormalizeNfc(RequireString(j, "original_text"));
  v.replace_text = NormalizeNfc(RequireString(j, "replace_text"));
  v.explanation = RequireString(j, "explanation");
  v.generator_model = OptionalString(j, "generator_model");
  v.triviality = MaybeEnum<TrivialityCategory>(j, "triviality");
}

void to_json(Json& j, const NonExecutableEdit& v) {
  j = Json{{"edit_id", v.edit_id},
           {"doc_id", v.doc_id},
           {"summary_id", v.summary_id},
           {"edited_summary", v.edited_summary},
           {"explanation", v.explanation},
           {"generator_model", v.generator_model}};
}

void from_json(const Json& j, NonExecutableEdit& v) {
  v.edit_id = RequireString(j, "edit_id");
  v.doc_id = OptionalString(j, "doc_id");
  v.summary_id = OptionalString(j, "summary_id");
  v.edited_summary = NormalizeNfc(RequireString(j, "edited_summary"));
  v.explanation = RequireString(j, "explanation");
  v.generator_model = OptionalString(j, "generator_model");
}

void to_json(Json& j, const BenchmarkSample& v) {
  j = Json{{"sample_id", v.sample_id},
           {"domain", v.domain},
           {"doc_id", v.doc_id},
           {"summary_id", v.summary_id},
           {"summary_text", v.summary_text},
           {"label", ToString(v.label)}};
  if (v.edit) j["edit"] = *v.edit;
  if (v.reference_explanation) j["reference_explanation"] = *v.reference_explanation;
}

void from_json(const Json& j, BenchmarkSample& v) {
  v.sample_id = RequireString(j, "sample_id");
  v.domain = OptionalString(j, "domain");
  v.doc_id = RequireString(j, "doc_id");
  v.summary_id = OptionalString(j, "summary_id");
  v.summary_text = NormalizeNfc(RequireString(j, "summary_text"));
  v.label = RequireEnum<Label>(j, "label");
  v.edit.reset();
  if (const auto it = j.find("edit"); it != j.end() && !it->is_null()) {
    v.edit = it->get<ExecutableEdit>();
  }
  v.reference_explanation = MaybeString(j, "reference_explanation");
}

void to_json(Json& j, const DetectionResponse& v) {
  j = Json{{"sample_id", v.sample_id},
           {"model", v.model},
           {"prompt_kind", ToString(v.prompt_kind)},
           {"verdict", ToString(v.verdict)}};
  if (v.explanation) j["explanation"] = *v.explanation;
  j["raw"] = v.raw;
}

void from_json(const Json& j, DetectionResponse& v) {
  v.sample_id = RequireString(j, "sample_id");
  v.model = OptionalString(j, "model");
  v.prompt_kind = RequireEnum<PromptKind>(j, "prompt_kind");
  v.verdict = RequireEnum<Verdict>(j, "verdict");
  v.explanation = MaybeString(j, "explanation");
  v.raw = OptionalString(j, "raw");
}

void to_json(Json& j, const JudgeLabel& v) {
  j = Json{{"value", v.value.value()},
           {"variant", ToString(v.variant)},
           {"judge_model", v.judge_model}};
}

void from_json(const Json& j, JudgeLabel& v) {
  v.value = LabelValue(j.at("value").get<double>());
  v.variant = RequireEnum<JudgeVariant>(j, "variant");
  v.judge_model = OptionalString(j, "judge_model");
}

void to_json(Json& j, const JudgmentRecord& v) {
  j = Json{{"sample_id", v.sample_id},
           {"candidate_model", v.candidate_model},
           {"prompt_kind", ToString(v.prompt_kind)},
           {"variant", ToString(v.variant)},
           {"judge_model", v.judge_model},
           {"label", v.label},
           {"flagged", v.flagged},
           {"raw", v.raw}};
}

void from_json(const Json& j, JudgmentRecord& v) {
  v.sample_id = RequireString(j, "sample_id");
  v.candidate_model = OptionalString(j, "candidate_model");
  v.prompt_kind = RequireEnum<PromptKind>(j, "prompt_kind");
  v.variant = RequireEnum<JudgeVariant>(j, "variant");
  v.judge_model = OptionalString(j, "judge_model");
  v.label = LabelValue(j.at("label").get<double>()).value();
  v.flagged = j.value("flagged", false);
  v.raw = OptionalString(j, "raw");
}

void to_json(Json& j, const AnnotationRecord& v) {
  j = Json{{"annotator_id", v.annotator_id},
           {"target_id", v.target_id},
           {"kind", ToString(v.kind)}};
  PutEnum(j, "q_inconsistent", v.q_inconsistent);
  PutEnum(j, "q_complex", v.q_complex);
  PutEnum(j, "q_controlled", v.q_controlled);
  PutEnum(j, "q_explanation", v.q_explanation);
  if (v.label) j["label"] = *v.label;
  j["timestamp"] = v.timestamp;
}

void from_json(const Json& j, AnnotationRecord& v) {
  v.annotator_id = RequireString(j, "annotator_id");
  v.target_id = RequireString(j, "target_id");
  v.kind = RequireEnum<AnnotationKind>(j, "kind");
  v.q_inconsistent = MaybeEnum<Answer>(j, "q_inconsistent");
  v.q_complex = MaybeEnum<Answer>(j, "q_complex");
  v.q_controlled = MaybeEnum<Answer>(j, "q_controlled");
  v.q_explanation = MaybeEnum<Answer>(j, "q_explanation");
  v.label.reset();
  if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
    if (it->is_number()) {
      v.label = it->get<double>();
    } else if (it->is_string()) {
      const std::string s = it->get<std::string>();
      if (s == "1") v.label = 1.0;
      else if (s == "0.5") v.label = 0.5;
      else if (s == "0") v.label = 0.0;
      else throw Error(ErrorCode::kParse, "label must be 0, 0.5 or 1");
    } else {
      throw Error(ErrorCode::kParse, "label must be a number");
    }
  }
  v.timestamp = OptionalString(j, "timestamp");
}

}  // namespace execedit
