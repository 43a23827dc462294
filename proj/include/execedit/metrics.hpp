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

// Score algebra and agreement statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "execedit/error.hpp"
#include "execedit/model.hpp"

namespace execedit {

// ---------------------------------------------------------------------------
// Detection and explanation scores
// ---------------------------------------------------------------------------

// Fraction of verdicts equal to the gold label; unparsable is always wrong.
double DetectionAccuracy(std::span<const Verdict> verdicts, std::span<const Label> gold);

struct DetectionScore {
  std::vector<double> per_sample;  // 1 iff verdict is inconsistent
  double mean = 0.0;
};

// Verdicts on gold-inconsistent samples only. kEmptyInput when empty.
DetectionScore ComputeDetectionScore(std::span<const Verdict> verdicts);

// Mean of three-level labels; nullopt for an empty set.
std::optional<double> ExplanationScore(std::span<const double> labels);

// mean(ds_i * es_i) over aligned per-sample vectors. es_i must be 0 wherever
// ds_i is 0. Errors: kLengthMismatch, kEmptyInput, kInvalidArgument.
double JointScore(std::span<const double> ds, std::span<const double> es_or_zero);

struct ScoreRow {
  std::string model;
  PromptKind prompt_kind = PromptKind::kDetectAndExplain;
  std::optional<double> da;  // D&E only
  std::optional<double> ds;  // D&E only
  std::optional<double> es;  // absent when nothing was judged
  std::optional<double> js;  // D&E only; 0 when es is absent
  std::size_t n_total = 0;
  std::size_t n_inconsistent = 0;
  std::size_t n_detected = 0;
  std::size_t n_unparsable = 0;
};

// Joins responses and judgments to the benchmark by sample_id. For D&E every
// sample must have a response and every detected inconsistent sample a
// judgment; for E|D every inconsistent sample needs both.
ScoreRow ComputeScoreRow(const std::vector<BenchmarkSample>& samples,
                         const std::vector<DetectionResponse>& responses,
                         const std::vector<JudgmentRecord>& judgments);

std::string FormatScoreTable(const std::vector<ScoreRow>& rows);
std::string ScoreTableCsv(const std::vector<ScoreRow>& rows);
Json ScoreRowToJson(const ScoreRow& row);

// ---------------------------------------------------------------------------
// Agreement
// ---------------------------------------------------------------------------

// Cohen's kappa, (p_o - p_e) / (1 - p_e) with p_e from the marginals. When
// p_e == 1 (both raters used one and the same class throughout) the result
// is 1. kLengthMismatch on unequal lengths, kEmptyInput when empty.
template <typename T>
double CohenKappa(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kLengthMismatch, "cohen_kappa");
  if (a.empty()) throw Error(ErrorCode::kEmptyInput, "cohen_kappa");
  std::map<T, std::array<double, 2>> marginals;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    marginals[a[i]][0] += 1.0;
    marginals[b[i]][1] += 1.0;
    if (a[i] == b[i]) ++agree;
  }
  const double n = static_cast<double>(a.size());
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [label, m] : marginals) p_e += (m[0] / n) * (m[1] / n);
  if (1.0 - p_e <= 0.0) return p_o == 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

template <typename T>
double CohenKappa(const std::vector<T>& a, const std::vector<T>& b) {
  return CohenKappa(std::span<const T>(a), std::span<const T>(b));
}

enum class CorrelationKind { kPearson, kSpearman };

// Errors: kLengthMismatch, kEmptyInput (fewer than 2 points), kConstantVector.
double Correlation(std::span<const double> a, std::span<const double> b,
                   CorrelationKind kind);

// 1-based ranks; ties share their average rank.
std::vector<double> AverageRanks(std::span<const double> values);

// Mean per-class recall over the classes present in `gold`.
template <typename T>
double BalancedAccuracy(std::span<const T> pred, std::span<const T> gold) {
  if (pred.size() != gold.size()) throw Error(ErrorCode::kLengthMismatch, "balanced_accuracy");
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "balanced_accuracy");
  std::map<T, std::array<std::size_t, 2>> per_class;  // {hits, support}
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto& c = per_class[gold[i]];
    ++c[1];
    if (pred[i] == gold[i]) ++c[0];
  }
  double sum = 0.0;
  for (const auto& [label, c] : per_class) {
    sum += static_cast<double>(c[0]) / static_cast<double>(c[1]);
  }
  return sum / static_cast<double>(per_class.size());
}

template <typename T>
double BalancedAccuracy(const std::vector<T>& pred, const std::vector<T>& gold) {
  return BalancedAccuracy(std::span<const T>(pred), std::span<const T>(gold));
}

struct AgreementReport {
  std::size_t n = 0;
  double cohen_kappa = 0.0;
  std::optional<double> pearson_r;     // absent when either side is constant
  std::optional<double> spearman_rho;  // or n < 2
  std::optional<double> balanced_accuracy;
};

// Judge labels against manual labels on the same explanations; manual labels
// are the gold side for balanced accuracy.
AgreementReport CalibrationReport(std::span<const double> judge,
                                  std::span<const double> manual);

// Symmetric agreement between two raters (no balanced accuracy).
AgreementReport RaterAgreement(std::span<const double> a, std::span<const double> b);

Json AgreementToJson(const AgreementReport& report);

// ---------------------------------------------------------------------------
// Sequential quality filter over edit annotations
// ---------------------------------------------------------------------------

// Column order of the exec vs non-exec comparison table.
inline constexpr Question kFilterColumns[] = {
    Question::kControlled, Question::kInconsistent, Question::kComplex,
    Question::kExplanation};

struct FilterRow {
  std::string condition;
  std::size_t n = 0;
  std::array<std::size_t, 4> survivors{};  // per column in kFilterColumns order
  std::array<double, 4> pct{};             // 100 * survivors / n, 2 decimals
};

// N is the number of distinct annotated edits. Column k keeps the edits that
// survived column k-1 and that no annotator answered "no" on its question.
// kGatingViolation if any record breaks the gating chain.
FilterRow SequentialFilterRow(const std::string& condition,
                              std::span<const AnnotationRecord> records);

std::vector<FilterRow> SequentialFilterTable(
    const std::vector<std::pair<std::string, std::vector<AnnotationRecord>>>& groups);

std::string FormatFilterTable(const std::vector<FilterRow>& rows);
Json FilterTableToJson(const std::vector<FilterRow>& rows);

// ---------------------------------------------------------------------------
// Explanation error taxonomy
// ---------------------------------------------------------------------------

struct TaxonomyReport {
  std::size_t total = 0;
  std::array<std::size_t, 4> counts{};  // indexed by ErrorCategory
  std::array<double, 4> percent{};      // one decimal, half-up
};

TaxonomyReport ComputeTaxonomyReport(std::span<const ErrorCategory> categories);
std::string FormatTaxonomyReport(const TaxonomyReport& report);
Json TaxonomyReportToJson(const TaxonomyReport& report);

}  // namespace execedit
