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

#include "execedit/metrics.hpp"

namespace execedit {

double DetectionAccuracy(std::span<const Verdict> verdicts, std::span<const Label> gold) {
  if (verdicts.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "detection_accuracy: " + std::to_string(verdicts.size()) +
                                                " verdicts vs " + std::to_string(gold.size()) + " labels");
  }
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "detection_accuracy");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool ok = (verdicts[i] == Verdict::kConsistent && gold[i] == Label::kConsistent) ||
                    (verdicts[i] == Verdict::kInconsistent && gold[i] == Label::kInconsistent);
    if (ok) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

DetectionScore ComputeDetectionScore(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::kEmptyInput, "detection_score");
  DetectionScore out;
  double sum = 0.0;
  for (Verdict v : verdicts) {
    out.per_sample.push_back(v == Verdict::kInconsistent ? 1.0 : 0.0);
    sum += out.per_sample.back();
  }
  out.mean = sum / static_cast<double>(verdicts.size());
  return out;
}

std::optional<double> ExplanationScore(std::span<const double> labels) {
  if (labels.empty()) return std::nullopt;
  double sum = 0.0;
  for (double l : labels) {
    LabelValue{l};
    sum += l;
  }
  return sum / static_cast<double>(labels.size());
}

double JointScore(std::span<const double> ds, std::span<const double> es_or_zero) {
  if (ds.size() != es_or_zero.size()) throw Error(ErrorCode::kLengthMismatch, "joint_score");
  if (ds.empty()) throw Error(ErrorCode::kEmptyInput, "joint_score");
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i] != 0.0 && ds[i] != 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "detection indicator must be 0 or 1");
    }
    if (ds[i] == 0.0 && es_or_zero[i] != 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "explanation score on an undetected sample");
    }
    sum += ds[i] * es_or_zero[i];
  }
  return sum / static_cast<double>(ds.size());
}

ScoreRow ComputeScoreRow(const std::vector<BenchmarkSample>& samples,
                         const std::vector<DetectionResponse>& responses,
                         const std::vector<JudgmentRecord>& judgments) {
  if (responses.empty()) throw Error(ErrorCode::kEmptyInput, "no detection responses");
  ScoreRow row;
  row.model = responses.front().model;
  row.prompt_kind = responses.front().prompt_kind;

  std::map<std::string, const DetectionResponse*> response_of;
  for (const auto& r : responses) {
    if (r.model != row.model || r.prompt_kind != row.prompt_kind) {
      throw Error(ErrorCode::kInvalidArgument, "responses mix models or prompt kinds");
    }
    if (!response_of.emplace(r.sample_id, &r).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate response for " + r.sample_id);
    }
    if (r.verdict == Verdict::kUnparsable) ++row.n_unparsable;
  }
  std::map<std::string, double> label_of;
  for (const auto& j : judgments) {
    if (j.candidate_model != row.model || j.prompt_kind != row.prompt_kind) continue;
    if (!label_of.emplace(j.sample_id, j.label).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate judgment for " + j.sample_id);
    }
  }
  auto find_response = [&](const BenchmarkSample& s) -> const DetectionResponse* {
    const auto it = response_of.find(s.sample_id);
    return it == response_of.end() ? nullptr : it->second;
  };
  auto require_label = [&](const BenchmarkSample& s) {
    const auto it = label_of.find(s.sample_id);
    if (it == label_of.end()) {
      throw Error(ErrorCode::kInvalidArgument, "no judgment for sample " + s.sample_id);
    }
    return it->second;
  };

  row.n_total = samples.size();
  std::vector<Verdict> all_verdicts;
  std::vector<Label> gold;
  std::vector<Verdict> inconsistent_verdicts;
  std::vector<double> es_or_zero;
  std::vector<double> judged;
  for (const auto& s : samples) {
    const DetectionResponse* r = find_response(s);
    if (s.label == Label::kInconsistent) ++row.n_inconsistent;
    if (row.prompt_kind == PromptKind::kDetectAndExplain) {
      if (!r) throw Error(ErrorCode::kInvalidArgument, "no response for sample " + s.sample_id);
      all_verdicts.push_back(r->verdict);
      gold.push_back(s.label);
      if (s.label != Label::kInconsistent) continue;
      inconsistent_verdicts.push_back(r->verdict);
      if (r->verdict == Verdict::kInconsistent) {
        ++row.n_detected;
        const double l = require_label(s);
        judged.push_back(l);
        es_or_zero.push_back(l);
      } else {
        es_or_zero.push_back(0.0);
      }
    } else if (s.label == Label::kInconsistent) {
      if (!r) throw Error(ErrorCode::kInvalidArgument, "no response for sample " + s.sample_id);
      if (r->verdict == Verdict::kInconsistent) ++row.n_detected;
      judged.push_back(require_label(s));
    }
  }

  row.es = ExplanationScore(judged);
  if (row.prompt_kind == PromptKind::kDetectAndExplain) {
    row.da = DetectionAccuracy(all_verdicts, gold);
    if (!inconsistent_verdicts.empty()) {
      const DetectionScore ds = ComputeDetectionScore(inconsistent_verdicts);
      row.ds = ds.mean;
      row.js = JointScore(ds.per_sample, es_or_zero);
    }
  }
  return row;
}

namespace {

std::string Cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string CsvCell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

}  // namespace

std::string FormatScoreTable(const std::vector<ScoreRow>& rows) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.model.size());
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s %-9s %6s %6s %6s %6s %7s %7s %8s %10s\n",
                static_cast<int>(width), "Model", "Prompt", "DA", "DS", "ES", "JS", "N", "N_inc",
                "detected", "unparsable");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-*s %-9s %6s %6s %6s %6s %7zu %7zu %8zu %10zu\n",
                  static_cast<int>(width), r.model.c_str(),
                  std::string(ToString(r.prompt_kind)).c_str(), Cell(r.da).c_str(),
                  Cell(r.ds).c_str(), Cell(r.es).c_str(), Cell(r.js).c_str(), r.n_total,
                  r.n_inconsistent, r.n_detected, r.n_unparsable);
    os << line;
  }
  return os.str();
}

std::string ScoreTableCsv(const std::vector<ScoreRow>& rows) {
  std::ostringstream os;
  os << "model,prompt_kind,da,ds,es,js,n_total,n_inconsistent,n_detected,n_unparsable\n";
  for (const auto& r : rows) {
    std::string model = r.model;
    if (model.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : model) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      model = quoted + "\"";
    }
    os << model << ',' << ToString(r.prompt_kind) << ',' << CsvCell(r.da) << ',' << CsvCell(r.ds)
       << ',' << CsvCell(r.es) << ',' << CsvCell(r.js) << ',' << r.n_total << ','
       << r.n_inconsistent << ',' << r.n_detected << ',' << r.n_unparsable << '\n';
  }
  return os.str();
}

Json ScoreRowToJson(const ScoreRow& row) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"model", row.model},
              {"prompt_kind", ToString(row.prompt_kind)},
              {"da", opt(row.da)},
              {"ds", opt(row.ds)},
              {"es", opt(row.es)},
              {"js", opt(row.js)},
              {"n_total", row.n_total},
              {"n_inconsistent", row.n_inconsistent},
              {"n_detected", row.n_detected},
              {"n_unparsable", row.n_unparsable}};
}

}  // namespace execedit
