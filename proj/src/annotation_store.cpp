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

#include <spdlog/spdlog.h>

#include "execedit/annotation.hpp"
#include "execedit/error.hpp"
#include "execedit/hash.hpp"
#include "execedit/jsonl.hpp"

namespace execedit {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStoreKind = "annotation_log";

Json StoredToJson(const StoredRecord& s) {
  return Json{{"record_id", s.record_id}, {"revision", s.revision}, {"record", s.record}};
}

}  // namespace

std::string AnnotationStore::RecordId(const AnnotationRecord& record) {
  return ContentId({record.annotator_id, record.target_id, std::string(ToString(record.kind))});
}

AnnotationStore::AnnotationStore(fs::path file) : file_(std::move(file)) {
  auto snap = std::make_shared<Snapshot>();
  std::error_code ec;
  if (!file_.empty() && fs::exists(file_, ec)) {
    const std::string text = ReadFile(file_);
    // A crash mid-append can leave a torn last line; everything before it
    // was fsynced and is kept.
    std::size_t usable = text.size();
    if (!text.empty() && text.back() != '\n') {
      usable = text.rfind('\n') == std::string::npos ? 0 : text.rfind('\n') + 1;
      spdlog::warn("{}: ignoring incomplete trailing line", file_.string());
    }
    if (usable > 0) {
      for (const Json& j : ParseJsonl(std::string_view(text).substr(0, usable), kStoreKind).records) {
        StoredRecord s{j.at("record_id").get<std::string>(), j.at("revision").get<int>(),
                       j.at("record").get<AnnotationRecord>()};
        const auto [it, inserted] = snap->latest.insert_or_assign(s.record_id, snap->history.size());
        if (inserted) snap->order.push_back(s.record_id);
        snap->history.push_back(std::move(s));
      }
    }
  }
  snapshot_ = std::move(snap);
}

std::shared_ptr<const AnnotationStore::Snapshot> AnnotationStore::Load() const {
  std::lock_guard lock(snapshot_mu_);
  return snapshot_;
}

StoredRecord AnnotationStore::Append(const AnnotationRecord& record) {
  std::lock_guard write_lock(write_mu_);
  const auto current = Load();
  StoredRecord stored{RecordId(record), 0, record};
  if (const auto it = current->latest.find(stored.record_id); it != current->latest.end()) {
    stored.revision = current->history[it->second].revision + 1;
  }
  if (!file_.empty()) {
    std::string bytes;
    std::error_code ec;
    if (!fs::exists(file_, ec) || fs::file_size(file_, ec) == 0) {
      bytes = SerializeJsonl(JsonlHeader{kSchemaVersion, std::string(kStoreKind), ""}, {});
    }
    bytes += StoredToJson(stored).dump() + "\n";
    AppendDurable(file_, bytes);
  }
  auto next = std::make_shared<Snapshot>(*current);
  const auto [it, inserted] = next->latest.insert_or_assign(stored.record_id, next->history.size());
  if (inserted) next->order.push_back(stored.record_id);
  next->history.push_back(stored);
  {
    std::lock_guard lock(snapshot_mu_);
    snapshot_ = std::move(next);
  }
  return stored;
}

std::vector<AnnotationRecord> AnnotationStore::Export(const ExportFilter& filter) const {
  const auto snap = Load();
  std::vector<AnnotationRecord> out;
  for (const auto& id : snap->order) {
    const AnnotationRecord& r = snap->history[snap->latest.at(id)].record;
    if (filter.annotator_id && r.annotator_id != *filter.annotator_id) continue;
    if (filter.kind && r.kind != *filter.kind) continue;
    if (filter.target_id && r.target_id != *filter.target_id) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<StoredRecord> AnnotationStore::History() const { return Load()->history; }

bool AnnotationStore::Has(const std::string& annotator_id, const std::string& target_id,
                          AnnotationKind kind) const {
  AnnotationRecord probe;
  probe.annotator_id = annotator_id;
  probe.target_id = target_id;
  probe.kind = kind;
  return Load()->latest.contains(RecordId(probe));
}

}  // namespace execedit
