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

#include <cstdio>
#include <map>
#include <sstream>

#include "execedit/benchmark_builder.hpp"
#include "execedit/metrics.hpp"

namespace execedit {

FilterRow SequentialFilterRow(const std::string& condition,
                              std::span<const AnnotationRecord> records) {
  FilterRow row;
  row.condition = condition;
  // failed[target][k]: some annotator answered "no" on column k.
  std::map<std::string, std::array<bool, 4>> failed;
  for (const auto& r : records) {
    if (r.kind != AnnotationKind::kEditQuality) {
      throw Error(ErrorCode::kInvalidArgument, "explanation label in an edit-quality table");
    }
    const auto violations = GatingViolations(r);
    if (!violations.empty()) {
      throw Error(ErrorCode::kGatingViolation,
                  r.annotator_id + "/" + r.target_id + ": " + violations.front());
    }
    auto& f = failed.try_emplace(r.target_id, std::array<bool, 4>{}).first->second;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& answer = AnswerFor(r, kFilterColumns[k]);
      if (answer && *answer == Answer::kNo) f[k] = true;
    }
  }
  row.n = failed.size();
  for (const auto& [target, f] : failed) {
    for (std::size_t k = 0; k < 4 && !f[k]; ++k) ++row.survivors[k];
  }
  for (std::size_t k = 0; k < 4; ++k) {
    row.pct[k] = row.n == 0 ? 0.0
                            : RoundHalfUp(100.0 * static_cast<double>(row.survivors[k]) /
                                              static_cast<double>(row.n), 2);
  }
  return row;
}

std::vector<FilterRow> SequentialFilterTable(
    const std::vector<std::pair<std::string, std::vector<AnnotationRecord>>>& groups) {
  std::vector<FilterRow> rows;
  for (const auto& [condition, records] : groups) {
    rows.push_back(SequentialFilterRow(condition, records));
  }
  return rows;
}

std::string FormatFilterTable(const std::vector<FilterRow>& rows) {
  std::size_t width = 9;
  for (const auto& r : rows) width = std::max(width, r.condition.size());
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s %6s %11s %13s %9s %12s\n", static_cast<int>(width),
                "Condition", "N", "%Controlled", "%Inconsistent", "%Complex", "%Explanation");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-*s %6zu %11.2f %13.2f %9.2f %12.2f\n",
                  static_cast<int>(width), r.condition.c_str(), r.n, r.pct[0], r.pct[1], r.pct[2],
                  r.pct[3]);
    os << line;
  }
  return os.str();
}

Json FilterTableToJson(const std::vector<FilterRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json columns = Json::object();
    for (std::size_t k = 0; k < 4; ++k) {
      columns[std::string(ToString(kFilterColumns[k]))] =
          Json{{"survivors", r.survivors[k]}, {"pct", r.pct[k]}};
    }
    out.push_back(Json{{"condition", r.condition}, {"n", r.n}, {"columns", columns}});
  }
  return out;
}

}  // namespace execedit
