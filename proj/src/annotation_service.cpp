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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "execedit/annotation.hpp"
#include "execedit/benchmark_builder.hpp"
#include "execedit/error.hpp"
#include "execedit/hash.hpp"
#include "execedit/jsonl.hpp"

namespace execedit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Items
// ---------------------------------------------------------------------------

namespace {

Json SpanToJson(const EditSpan& s) {
  return Json{{"original_begin", s.original_begin},
              {"original_length", s.original_length},
              {"replace_begin", s.replace_begin},
              {"replace_length", s.replace_length}};
}

EditSpan SpanFromJson(const Json& j) {
  return EditSpan{j.at("original_begin").get<std::size_t>(), j.at("original_length").get<std::size_t>(),
                  j.at("replace_begin").get<std::size_t>(), j.at("replace_length").get<std::size_t>()};
}

template <typename Map>
const auto& Lookup(const Map& map, const std::string& key, const char* what) {
  const auto it = map.find(key);
  if (it == map.end()) throw Error(ErrorCode::kInvalidArgument, std::string("unknown ") + what + " '" + key + "'");
  return it->second;
}

std::string UtcTimestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t AnnotatorSeed(std::uint64_t seed, const std::string& annotator_id) {
  return seed ^ std::stoull(Sha256Hex(annotator_id).substr(0, 16), nullptr, 16);
}

}  // namespace

void to_json(Json& j, const AnnotationItem& v) {
  j = Json{{"item_id", v.item_id},
           {"mode", ToString(v.mode)},
           {"document_text", v.document_text},
           {"seed_summary", v.seed_summary},
           {"edited_summary", v.edited_summary},
           {"span", SpanToJson(v.span)},
           {"generator_model", v.generator_model},
           {"prompt_variant", v.prompt_variant},
           {"condition", v.condition}};
  if (v.candidate_explanation) j["candidate_explanation"] = *v.candidate_explanation;
  if (v.reference_explanation) j["reference_explanation"] = *v.reference_explanation;
}

void from_json(const Json& j, AnnotationItem& v) {
  v.item_id = j.at("item_id").get<std::string>();
  v.mode = FromString<AnnotationKind>(j.at("mode").get<std::string>());
  v.document_text = j.at("document_text").get<std::string>();
  v.seed_summary = j.at("seed_summary").get<std::string>();
  v.edited_summary = j.at("edited_summary").get<std::string>();
  v.span = SpanFromJson(j.at("span"));
  v.candidate_explanation.reset();
  v.reference_explanation.reset();
  if (j.contains("candidate_explanation")) v.candidate_explanation = j.at("candidate_explanation").get<std::string>();
  if (j.contains("reference_explanation")) v.reference_explanation = j.at("reference_explanation").get<std::string>();
  v.generator_model = j.value("generator_model", "");
  v.prompt_variant = j.value("prompt_variant", "");
  v.condition = j.value("condition", "");
}

Json ItemPayload(const AnnotationItem& item) {
  Json j{{"item_id", item.item_id},
         {"mode", ToString(item.mode)},
         {"document_text", item.document_text},
         {"seed_summary", item.seed_summary},
         {"edited_summary", item.edited_summary},
         {"span", SpanToJson(item.span)}};
  if (item.candidate_explanation) j["candidate_explanation"] = *item.candidate_explanation;
  if (item.reference_explanation) j["reference_explanation"] = *item.reference_explanation;
  return j;
}

std::string ConditionLabel(const std::string& generator_model, EditMode mode) {
  return generator_model + (mode == EditMode::kExecutable ? " (Exec)" : " (Non-Exec)");
}

std::vector<AnnotationItem> ItemsFromExecutableEdits(
    const std::vector<ExecutableEdit>& edits, const std::map<std::string, SeedSummary>& seeds,
    const std::map<std::string, DocumentRecord>& documents) {
  std::vector<AnnotationItem> out;
  for (const auto& e : edits) {
    const SeedSummary& seed = Lookup(seeds, e.summary_id, "summary_id");
    AnnotationItem item;
    item.item_id = e.edit_id;
    item.mode = AnnotationKind::kEditQuality;
    item.document_text = Lookup(documents, e.doc_id, "doc_id").text;
    item.seed_summary = seed.text;
    item.edited_summary = ApplyEdit(seed, e);
    item.span = SpanOf(seed, e);
    item.reference_explanation = e.explanation;
    item.generator_model = e.generator_model;
    item.prompt_variant = std::string(ToString(EditMode::kExecutable));
    item.condition = ConditionLabel(e.generator_model, EditMode::kExecutable);
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<AnnotationItem> ItemsFromNonExecutableEdits(
    const std::vector<NonExecutableEdit>& edits, const std::map<std::string, SeedSummary>& seeds,
    const std::map<std::string, DocumentRecord>& documents) {
  std::vector<AnnotationItem> out;
  for (const auto& e : edits) {
    const SeedSummary& seed = Lookup(seeds, e.summary_id, "summary_id");
    AnnotationItem item;
    item.item_id = e.edit_id;
    item.mode = AnnotationKind::kEditQuality;
    item.document_text = Lookup(documents, e.doc_id, "doc_id").text;
    item.seed_summary = seed.text;
    item.edited_summary = e.edited_summary;
    item.span = DiffSpan(seed.text, e.edited_summary);
    item.reference_explanation = e.explanation;
    item.generator_model = e.generator_model;
    item.prompt_variant = std::string(ToString(EditMode::kNonExecutable));
    item.condition = ConditionLabel(e.generator_model, EditMode::kNonExecutable);
    out.push_back(std::move(item));
  }
  return out;
}

std::string ExplanationItemId(const std::string& sample_id, const std::string& model,
                              PromptKind kind) {
  return ContentId({sample_id, model, std::string(ToString(kind))});
}

std::vector<AnnotationItem> ItemsFromExplanations(
    const std::vector<BenchmarkSample>& samples, const std::vector<DetectionResponse>& responses,
    const std::map<std::string, SeedSummary>& seeds,
    const std::map<std::string, DocumentRecord>& documents) {
  std::map<std::string, const BenchmarkSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.sample_id, &s);
  std::vector<AnnotationItem> out;
  for (const auto& r : responses) {
    if (!r.explanation || r.explanation->empty()) continue;
    const auto it = by_id.find(r.sample_id);
    if (it == by_id.end() || it->second->label != Label::kInconsistent) continue;
    const BenchmarkSample& s = *it->second;
    const SeedSummary& seed = Lookup(seeds, s.summary_id, "summary_id");
    AnnotationItem item;
    item.item_id = ExplanationItemId(s.sample_id, r.model, r.prompt_kind);
    item.mode = AnnotationKind::kExplanationLabel;
    item.document_text = Lookup(documents, s.doc_id, "doc_id").text;
    item.seed_summary = seed.text;
    item.edited_summary = s.summary_text;
    item.span = s.edit ? SpanOf(seed, *s.edit) : DiffSpan(seed.text, s.summary_text);
    item.candidate_explanation = *r.explanation;
    item.reference_explanation = s.reference_explanation;
    item.generator_model = r.model;
    item.prompt_variant = std::string(ToString(r.prompt_kind));
    item.condition = r.model;
    out.push_back(std::move(item));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

void to_json(Json& j, const SessionRequest& v) {
  j = Json{{"annotator_id", v.annotator_id},       {"item_source", v.item_source},
           {"mode", ToString(v.mode)},             {"shuffle_seed", v.shuffle_seed},
           {"overlap_fraction", v.overlap_fraction}, {"annotator_index", v.annotator_index},
           {"annotator_count", v.annotator_count}};
}

void from_json(const Json& j, SessionRequest& v) {
  v.annotator_id = j.at("annotator_id").get<std::string>();
  v.item_source = j.at("item_source").get<std::string>();
  v.mode = FromString<AnnotationKind>(j.value("mode", "edit_quality"));
  v.shuffle_seed = j.value("shuffle_seed", std::uint64_t{0});
  v.overlap_fraction = j.value("overlap_fraction", 0.0);
  v.annotator_index = j.value("annotator_index", 0);
  v.annotator_count = j.value("annotator_count", 1);
}

Json SessionPayload(const AnnotationSession& session) {
  return Json{{"session_id", session.session_id},
              {"annotator_id", session.annotator_id},
              {"mode", ToString(session.mode)},
              {"item_ids", session.item_ids},
              {"cursor", session.cursor},
              {"overlap_set", session.overlap_set}};
}

SessionPlan PlanSession(const std::vector<std::string>& source_ids, const SessionRequest& request) {
  if (source_ids.empty()) throw Error(ErrorCode::kEmptySource, "item source is empty");
  if (!(request.overlap_fraction >= 0.0 && request.overlap_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "overlap_fraction must lie in [0, 1]");
  }
  if (request.annotator_count < 1 || request.annotator_index < 0 ||
      request.annotator_index >= request.annotator_count) {
    throw Error(ErrorCode::kInvalidArgument, "annotator_index must lie in [0, annotator_count)");
  }
  const std::size_t n = source_ids.size();
  const std::vector<std::size_t> perm = SeededPermutation(n, request.shuffle_seed);
  const auto shared = static_cast<std::size_t>(
      std::llround(request.overlap_fraction * static_cast<double>(n)));
  SessionPlan plan;
  std::vector<std::string> mine;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = source_ids[perm[i]];
    if (i < shared) {
      plan.overlap_set.push_back(id);
      mine.push_back(id);
    } else if ((i - shared) % static_cast<std::size_t>(request.annotator_count) ==
               static_cast<std::size_t>(request.annotator_index)) {
      mine.push_back(id);
    }
  }
  const std::vector<std::size_t> order =
      SeededPermutation(mine.size(), AnnotatorSeed(request.shuffle_seed, request.annotator_id));
  for (std::size_t i : order) plan.item_ids.push_back(mine[i]);
  return plan;
}

AnnotationService::AnnotationService(fs::path dir)
    : dir_(std::move(dir)),
      store_([&]() -> fs::path {
        if (dir_.empty()) return {};
        fs::create_directories(dir_);
        return dir_ / "annotations.jsonl";
      }()) {}

void AnnotationService::AddItemSource(const std::string& name, std::vector<AnnotationItem> items) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!index.emplace(items[i].item_id, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate item id " + items[i].item_id + " in " + name);
    }
  }
  std::lock_guard lock(mu_);
  sources_.insert_or_assign(name, std::move(items));
  source_index_.insert_or_assign(name, std::move(index));
}

void AnnotationService::Restore() {
  if (dir_.empty()) return;
  const fs::path path = dir_ / "sessions.jsonl";
  std::error_code ec;
  if (!fs::exists(path, ec)) return;
  std::lock_guard lock(mu_);
  const std::string text = ReadFile(path);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      spdlog::warn("{}: skipping unreadable session line", path.string());
      continue;
    }
    if (j.contains("schema_version")) continue;
    const std::string id = j.at("session_id").get<std::string>();
    if (sessions_.contains(id)) continue;
    ++session_counter_;
    CreateLocked(j.at("request").get<SessionRequest>(), id);
  }
}

AnnotationSession AnnotationService::CreateLocked(const SessionRequest& request,
                                                  std::string session_id) {
  if (request.annotator_id.empty()) throw Error(ErrorCode::kInvalidArgument, "annotator_id is empty");
  const auto src = sources_.find(request.item_source);
  if (src == sources_.end()) {
    throw Error(ErrorCode::kEmptySource, "no item source named '" + request.item_source + "'");
  }
  std::vector<std::string> ids;
  for (const auto& item : src->second) {
    if (item.mode == request.mode) ids.push_back(item.item_id);
  }
  const SessionPlan plan = PlanSession(ids, request);
  SessionState state{request, {}};
  state.session.session_id = std::move(session_id);
  state.session.annotator_id = request.annotator_id;
  state.session.item_source = request.item_source;
  state.session.mode = request.mode;
  state.session.item_ids = plan.item_ids;
  state.session.overlap_set = plan.overlap_set;
  state.session.cursor = CursorOf(state);
  AnnotationSession out = state.session;
  sessions_.insert_or_assign(out.session_id, std::move(state));
  return out;
}

AnnotationSession AnnotationService::CreateSession(const SessionRequest& request) {
  std::lock_guard lock(mu_);
  const std::string id = ContentId({request.annotator_id, request.item_source,
                                    std::string(ToString(request.mode)),
                                    std::to_string(request.shuffle_seed),
                                    std::to_string(session_counter_ + 1)});
  AnnotationSession session = CreateLocked(request, id);
  ++session_counter_;
  if (!dir_.empty()) {
    const fs::path path = dir_ / "sessions.jsonl";
    std::string bytes;
    std::error_code ec;
    if (!fs::exists(path, ec)) {
      bytes = SerializeJsonl(JsonlHeader{kSchemaVersion, "annotation_sessions", ""}, {});
    }
    bytes += Json{{"session_id", session.session_id}, {"request", request}}.dump() + "\n";
    AppendDurable(path, bytes);
  }
  return session;
}

std::size_t AnnotationService::CursorOf(const SessionState& state) const {
  std::size_t cursor = 0;
  for (const auto& id : state.session.item_ids) {
    if (!store_.Has(state.session.annotator_id, id, state.session.mode)) break;
    ++cursor;
  }
  return cursor;
}

const AnnotationItem& AnnotationService::Item(const std::string& source, const std::string& id) const {
  const auto& index = source_index_.at(source);
  const auto it = index.find(id);
  if (it == index.end()) throw Error(ErrorCode::kUnknownItem, "unknown item " + id);
  return sources_.at(source)[it->second];
}

AnnotationSession AnnotationService::GetSession(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session " + session_id);
  AnnotationSession s = it->second.session;
  s.cursor = CursorOf(it->second);
  return s;
}

std::optional<Json> AnnotationService::NextItem(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session " + session_id);
  const std::size_t cursor = CursorOf(it->second);
  const auto& ids = it->second.session.item_ids;
  if (cursor >= ids.size()) return std::nullopt;
  Json payload = ItemPayload(Item(it->second.session.item_source, ids[cursor]));
  payload["position"] = cursor;
  payload["total"] = ids.size();
  return payload;
}

StoredRecord AnnotationService::Submit(const std::string& session_id, const AnnotationRecord& record) {
  AnnotationRecord r = record;
  {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, "unknown session " + session_id);
    const AnnotationSession& s = it->second.session;
    if (r.annotator_id.empty()) r.annotator_id = s.annotator_id;
    if (r.annotator_id != s.annotator_id) {
      throw Error(ErrorCode::kInvalidArgument, "record annotator does not own the session");
    }
    if (r.kind != s.mode) {
      throw Error(ErrorCode::kInvalidArgument, "record kind does not match the session mode");
    }
    const auto violations = GatingViolations(r);
    if (!violations.empty()) throw Error(ErrorCode::kGatingViolation, violations.front());
    const auto pos = std::find(s.item_ids.begin(), s.item_ids.end(), r.target_id);
    if (pos == s.item_ids.end()) {
      throw Error(ErrorCode::kUnknownItem, "item " + r.target_id + " is not in this session");
    }
    if (static_cast<std::size_t>(pos - s.item_ids.begin()) > CursorOf(it->second)) {
      throw Error(ErrorCode::kUnknownItem, "item " + r.target_id + " has not been served yet");
    }
  }
  if (r.timestamp.empty()) r.timestamp = UtcTimestamp();
  return store_.Append(r);
}

std::vector<AnnotationRecord> AnnotationService::Export(const ExportFilter& filter) const {
  return store_.Export(filter);
}

std::string AnnotationService::ExportJsonl(const ExportFilter& filter) const {
  return SerializeJsonl(JsonlHeader{kSchemaVersion, "annotations", ""},
                        ToJsonRecords(store_.Export(filter)));
}

// ---------------------------------------------------------------------------
// Inter-annotator agreement
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, const AnnotationRecord*> ByTarget(const std::vector<AnnotationRecord>& records,
                                                        const std::string& annotator,
                                                        AnnotationKind kind) {
  std::map<std::string, const AnnotationRecord*> out;
  for (const auto& r : records) {
    if (r.annotator_id == annotator && r.kind == kind) out.insert_or_assign(r.target_id, &r);
  }
  return out;
}

double AnswerValue(Answer a) { return a == Answer::kYes ? 1.0 : 0.0; }

}  // namespace

IaaResult ComputeIaa(const std::vector<AnnotationRecord>& records, const std::string& annotator_a,
                     const std::string& annotator_b, Question question) {
  const auto a = ByTarget(records, annotator_a, AnnotationKind::kEditQuality);
  const auto b = ByTarget(records, annotator_b, AnnotationKind::kEditQuality);
  std::vector<double> va, vb;
  for (const auto& [target, ra] : a) {
    const auto it = b.find(target);
    if (it == b.end()) continue;
    const AnnotationRecord* rb = it->second;
    bool survives = true;
    for (Question q : kGatingOrder) {
      if (q == question) break;
      if (AnswerFor(*ra, q) != Answer::kYes || AnswerFor(*rb, q) != Answer::kYes) {
        survives = false;
        break;
      }
    }
    const auto& xa = AnswerFor(*ra, question);
    const auto& xb = AnswerFor(*rb, question);
    if (!survives || !xa || !xb) continue;
    va.push_back(AnswerValue(*xa));
    vb.push_back(AnswerValue(*xb));
  }
  if (va.empty()) {
    throw Error(ErrorCode::kEmptyOverlap, "no shared items reach question " +
                                              std::string(ToString(question)));
  }
  return IaaResult{std::string(ToString(question)), RaterAgreement(va, vb)};
}

IaaResult ComputeLabelIaa(const std::vector<AnnotationRecord>& records,
                          const std::string& annotator_a, const std::string& annotator_b) {
  const auto a = ByTarget(records, annotator_a, AnnotationKind::kExplanationLabel);
  const auto b = ByTarget(records, annotator_b, AnnotationKind::kExplanationLabel);
  std::vector<double> va, vb;
  for (const auto& [target, ra] : a) {
    const auto it = b.find(target);
    if (it == b.end() || !ra->label || !it->second->label) continue;
    va.push_back(*ra->label);
    vb.push_back(*it->second->label);
  }
  if (va.empty()) throw Error(ErrorCode::kEmptyOverlap, "no shared explanation labels");
  return IaaResult{"label", RaterAgreement(va, vb)};
}

std::vector<IaaResult> IaaTable(const std::vector<AnnotationRecord>& records,
                                const std::string& annotator_a, const std::string& annotator_b) {
  std::vector<IaaResult> rows;
  for (Question q : kGatingOrder) {
    try {
      rows.push_back(ComputeIaa(records, annotator_a, annotator_b, q));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyOverlap) throw;
      break;
    }
  }
  return rows;
}

std::string FormatIaaTable(const std::vector<IaaResult>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %6s %8s\n", "Question", "N", "Kappa");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-14s %6zu %8.3f\n", r.question.c_str(), r.report.n,
                  r.report.cohen_kappa);
    os << line;
  }
  return os.str();
}

}  // namespace execedit
