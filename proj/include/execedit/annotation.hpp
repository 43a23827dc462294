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

// Annotation items, the append-only record store, sessions, and
// inter-annotator agreement.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "execedit/edit_synthesis.hpp"
#include "execedit/metrics.hpp"
#include "execedit/model.hpp"

namespace execedit {

// One thing to annotate. generator_model, prompt_variant and condition are
// server-side only and never appear in a payload sent to the UI.
struct AnnotationItem {
  std::string item_id;
  AnnotationKind mode = AnnotationKind::kEditQuality;
  std::string document_text;
  std::string seed_summary;
  std::string edited_summary;
  EditSpan span;
  std::optional<std::string> candidate_explanation;
  std::optional<std::string> reference_explanation;

  std::string generator_model;
  std::string prompt_variant;
  std::string condition;
};

void to_json(Json& j, const AnnotationItem& v);  // full record, for item files
void from_json(const Json& j, AnnotationItem& v);

// Anonymized view served to annotators.
Json ItemPayload(const AnnotationItem& item);

// Condition label "<model> (Exec)" / "<model> (Non-Exec)".
std::string ConditionLabel(const std::string& generator_model, EditMode mode);

std::vector<AnnotationItem> ItemsFromExecutableEdits(
    const std::vector<ExecutableEdit>& edits,
    const std::map<std::string, SeedSummary>& seeds,
    const std::map<std::string, DocumentRecord>& documents);

std::vector<AnnotationItem> ItemsFromNonExecutableEdits(
    const std::vector<NonExecutableEdit>& edits,
    const std::map<std::string, SeedSummary>& seeds,
    const std::map<std::string, DocumentRecord>& documents);

// Explanation id for (sample, candidate model, prompt kind).
std::string ExplanationItemId(const std::string& sample_id, const std::string& model,
                              PromptKind kind);

// Items for labelling candidate explanations on inconsistent samples (only
// responses that carry a non-empty explanation).
std::vector<AnnotationItem> ItemsFromExplanations(
    const std::vector<BenchmarkSample>& samples,
    const std::vector<DetectionResponse>& responses,
    const std::map<std::string, SeedSummary>& seeds,
    const std::map<std::string, DocumentRecord>& documents);

// ---------------------------------------------------------------------------

struct ExportFilter {
  std::optional<std::string> annotator_id;
  std::optional<AnnotationKind> kind;
  std::optional<std::string> target_id;
};

struct StoredRecord {
  std::string record_id;  // stable per (annotator, target, kind)
  int revision = 0;       // 0 on first submission, +1 per overwrite
  AnnotationRecord record;
};

// Append-only JSONL store. Each submission appends a line; the latest line
// per record_id wins and earlier ones remain as the audit trail. The index is
// rebuilt from the file on construction. An empty path keeps everything in
// memory.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path file = {});

  StoredRecord Append(const AnnotationRecord& record);

  // Latest revision of each matching record, ordered by first submission.
  std::vector<AnnotationRecord> Export(const ExportFilter& filter = {}) const;
  std::vector<StoredRecord> History() const;  // every line, in file order
  bool Has(const std::string& annotator_id, const std::string& target_id,
           AnnotationKind kind) const;

  static std::string RecordId(const AnnotationRecord& record);

 private:
  struct Snapshot {
    std::vector<StoredRecord> history;
    std::map<std::string, std::size_t> latest;  // record_id -> history index
    std::vector<std::string> order;             // record_ids by first submission
  };

  std::shared_ptr<const Snapshot> Load() const;

  std::filesystem::path file_;
  std::mutex write_mu_;
  mutable std::mutex snapshot_mu_;  // guards the pointer swap only
  std::shared_ptr<const Snapshot> snapshot_;
};

// ---------------------------------------------------------------------------

struct SessionRequest {
  std::string annotator_id;
  std::string item_source;
  AnnotationKind mode = AnnotationKind::kEditQuality;
  std::uint64_t shuffle_seed = 0;
  double overlap_fraction = 0.0;  // share of the source every annotator sees
  int annotator_index = 0;        // this annotator's slot among annotator_count
  int annotator_count = 1;
};

void to_json(Json& j, const SessionRequest& v);
void from_json(const Json& j, SessionRequest& v);

struct AnnotationSession {
  std::string session_id;
  std::string annotator_id;
  std::string item_source;
  AnnotationKind mode = AnnotationKind::kEditQuality;
  std::vector<std::string> item_ids;  // presentation order
  std::size_t cursor = 0;
  std::vector<std::string> overlap_set;
};

Json SessionPayload(const AnnotationSession& session);

// Splits a source between annotators. The seeded permutation of the source's
// ids puts round(overlap_fraction * N) ids in the shared set; the rest are
// dealt round-robin over annotator slots. Each session sees the shared set
// plus its own share, in an order shuffled per annotator.
struct SessionPlan {
  std::vector<std::string> item_ids;
  std::vector<std::string> overlap_set;
};
SessionPlan PlanSession(const std::vector<std::string>& source_ids,
                        const SessionRequest& request);

class AnnotationService {
 public:
  // Records go to <dir>/annotations.jsonl and sessions to <dir>/sessions.jsonl.
  // An empty dir keeps everything in memory. Item sources must be added
  // before Restore() replays persisted sessions.
  explicit AnnotationService(std::filesystem::path dir = {});

  void AddItemSource(const std::string& name, std::vector<AnnotationItem> items);
  void Restore();

  // kEmptySource, kInvalidArgument.
  AnnotationSession CreateSession(const SessionRequest& request);
  AnnotationSession GetSession(const std::string& session_id) const;  // kUnknownSession

  // Anonymized payload of the item at the cursor, or nullopt when finished.
  std::optional<Json> NextItem(const std::string& session_id) const;

  // kGatingViolation, kUnknownItem, kUnknownSession, kInvalidArgument.
  StoredRecord Submit(const std::string& session_id, const AnnotationRecord& record);

  std::vector<AnnotationRecord> Export(const ExportFilter& filter = {}) const;
  std::string ExportJsonl(const ExportFilter& filter = {}) const;

  const AnnotationStore& store() const { return store_; }

 private:
  struct SessionState {
    SessionRequest request;
    AnnotationSession session;
  };

  AnnotationSession CreateLocked(const SessionRequest& request, std::string session_id);
  std::size_t CursorOf(const SessionState& state) const;
  const AnnotationItem& Item(const std::string& source, const std::string& id) const;

  std::filesystem::path dir_;
  AnnotationStore store_;
  mutable std::mutex mu_;
  std::map<std::string, std::vector<AnnotationItem>> sources_;
  std::map<std::string, std::map<std::string, std::size_t>> source_index_;
  std::map<std::string, SessionState> sessions_;
  std::uint64_t session_counter_ = 0;
};

// ---------------------------------------------------------------------------

struct IaaResult {
  std::string question;  // "inconsistent" ... or "label"
  AgreementReport report;
};

// Agreement on one edit-quality question over the items both annotators
// labelled that survive every earlier question with "yes" from both.
// kEmptyOverlap when nothing survives.
IaaResult ComputeIaa(const std::vector<AnnotationRecord>& records,
                     const std::string& annotator_a, const std::string& annotator_b,
                     Question question);

// Agreement on explanation labels over the shared items.
IaaResult ComputeLabelIaa(const std::vector<AnnotationRecord>& records,
                          const std::string& annotator_a, const std::string& annotator_b);

// All four questions in gating order; rows after the overlap empties out are
// omitted.
std::vector<IaaResult> IaaTable(const std::vector<AnnotationRecord>& records,
                                const std::string& annotator_a,
                                const std::string& annotator_b);

std::string FormatIaaTable(const std::vector<IaaResult>& rows);

}  // namespace execedit
