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

// Domain records shared by every stage of the pipeline. All records are
// plain values; JSON field names match the member names.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace execedit {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class TrivialityCategory { kDateChange, kNumberChange, kAntonymChange, kOther };
enum class Label { kConsistent, kInconsistent };
enum class Verdict { kConsistent, kInconsistent, kUnparsable };
enum class PromptKind { kDetectAndExplain, kExplainGivenDetection };
enum class JudgeVariant { kV1, kV2, kV3, kV4 };
enum class AnnotationKind { kEditQuality, kExplanationLabel };
enum class Answer { kYes, kNo };
enum class ErrorCategory {
  kMisattribution,
  kAdditionalIrrelevant,
  kCompletenessFocus,
  kVague,
};
enum class EditMode { kExecutable, kNonExecutable };

std::string_view ToString(TrivialityCategory v);  // "DATE_CHANGE", ...
std::string_view ToString(Label v);               // "consistent"
std::string_view ToString(Verdict v);             // "unparsable"
std::string_view ToString(PromptKind v);          // "D_AND_E", "E_GIVEN_D"
std::string_view ToString(JudgeVariant v);        // "V1".."V4"
std::string_view ToString(AnnotationKind v);      // "edit_quality"
std::string_view ToString(Answer v);              // "yes", "no"
std::string_view ToString(ErrorCategory v);       // "MISATTRIBUTION", ...
std::string_view ToString(EditMode v);            // "executable"

// Strict inverse of ToString; unknown strings throw kParse. Triviality and
// error categories accept any letter case.
template <typename E>
E FromString(std::string_view s);

// ---------------------------------------------------------------------------
// Three-level explanation label
// ---------------------------------------------------------------------------

// One of exactly {0.0, 0.5, 1.0}.
class LabelValue {
 public:
  static constexpr double kNotCorrect = 0.0;
  static constexpr double kPartiallyCorrect = 0.5;
  static constexpr double kEntirelyCorrect = 1.0;

  // Throws kInvalidArgument unless value is one of the three levels.
  explicit LabelValue(double value);

  double value() const { return value_; }
  friend bool operator==(LabelValue, LabelValue) = default;
  friend auto operator<=>(LabelValue, LabelValue) = default;

 private:
  double value_;
};

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct DocumentRecord {
  std::string doc_id;
  std::string domain;
  std::string text;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

struct SeedSummary {
  std::string summary_id;
  std::string doc_id;
  std::string text;

  friend bool operator==(const SeedSummary&, const SeedSummary&) = default;
};

struct ExecutableEdit {
  std::string edit_id;
  std::string doc_id;
  std::string summary_id;
  std::string original_text;
  std::string replace_text;
  std::string explanation;
  std::string generator_model;
  std::optional<TrivialityCategory> triviality;

  friend bool operator==(const ExecutableEdit&, const ExecutableEdit&) = default;
};

// Content hash of (doc_id, original_text, replace_text, generator_model).
std::string MakeEditId(std::string_view doc_id, std::string_view original_text,
                       std::string_view replace_text,
                       std::string_view generator_model);

struct NonExecutableEdit {
  std::string edit_id;
  std::string doc_id;
  std::string summary_id;
  std::string edited_summary;
  std::string explanation;
  std::string generator_model;

  friend bool operator==(const NonExecutableEdit&, const NonExecutableEdit&) = default;
};

struct BenchmarkSample {
  std::string sample_id;
  std::string domain;
  std::string doc_id;
  std::string summary_id;
  std::string summary_text;
  Label label = Label::kConsistent;
  std::optional<ExecutableEdit> edit;
  std::optional<std::string> reference_explanation;

  friend bool operator==(const BenchmarkSample&, const BenchmarkSample&) = default;
};

struct DetectionResponse {
  std::string sample_id;
  std::string model;
  PromptKind prompt_kind = PromptKind::kDetectAndExplain;
  Verdict verdict = Verdict::kUnparsable;
  std::optional<std::string> explanation;
  std::string raw;

  friend bool operator==(const DetectionResponse&, const DetectionResponse&) = default;
};

struct JudgeLabel {
  LabelValue value{0.0};
  JudgeVariant variant = JudgeVariant::kV4;
  std::string judge_model;

  friend bool operator==(const JudgeLabel&, const JudgeLabel&) = default;
};

// One judged candidate explanation, keyed by
// (sample_id, candidate_model, prompt_kind, variant, judge_model).
struct JudgmentRecord {
  std::string sample_id;
  std::string candidate_model;
  PromptKind prompt_kind = PromptKind::kDetectAndExplain;
  JudgeVariant variant = JudgeVariant::kV4;
  std::string judge_model;
  double label = 0.0;
  bool flagged = false;  // label defaulted after an unparsable judge reply
  std::string raw;

  friend bool operator==(const JudgmentRecord&, const JudgmentRecord&) = default;
};

struct AnnotationRecord {
  std::string annotator_id;
  std::string target_id;
  AnnotationKind kind = AnnotationKind::kEditQuality;
  std::optional<Answer> q_inconsistent;
  std::optional<Answer> q_complex;
  std::optional<Answer> q_controlled;
  std::optional<Answer> q_explanation;
  std::optional<double> label;
  std::string timestamp;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

// The four edit-quality questions in the order the annotator answers them.
enum class Question { kInconsistent, kComplex, kControlled, kExplanation };
inline constexpr Question kGatingOrder[] = {
    Question::kInconsistent, Question::kComplex, Question::kControlled,
    Question::kExplanation};
std::string_view ToString(Question q);  // "inconsistent", ...
const std::optional<Answer>& AnswerFor(const AnnotationRecord& r, Question q);

// Empty when the record obeys the gating chain and carries exactly the
// fields of its kind.
std::vector<std::string> GatingViolations(const AnnotationRecord& r);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every BenchmarkSample invariant against the sample's seed summary.
ValidationReport ValidateSample(const BenchmarkSample& sample,
                                const SeedSummary& seed);

// Corpus-level uniqueness of sample_id, doc_id (per distinct document) and
// edit_id.
ValidationReport ValidateUniqueIds(const std::vector<BenchmarkSample>& samples);

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

void to_json(Json& j, const DocumentRecord& v);
void from_json(const Json& j, DocumentRecord& v);
void to_json(Json& j, const SeedSummary& v);
void from_json(const Json& j, SeedSummary& v);
void to_json(Json& j, const ExecutableEdit& v);
void from_json(const Json& j, ExecutableEdit& v);
void to_json(Json& j, const NonExecutableEdit& v);
void from_json(const Json& j, NonExecutableEdit& v);
void to_json(Json& j, const BenchmarkSample& v);
void from_json(const Json& j, BenchmarkSample& v);
void to_json(Json& j, const DetectionResponse& v);
void from_json(const Json& j, DetectionResponse& v);
void to_json(Json& j, const JudgeLabel& v);
void from_json(const Json& j, JudgeLabel& v);
void to_json(Json& j, const JudgmentRecord& v);
void from_json(const Json& j, JudgmentRecord& v);
void to_json(Json& j, const AnnotationRecord& v);
void from_json(const Json& j, AnnotationRecord& v);

}  // namespace execedit
