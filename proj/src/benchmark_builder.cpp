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

#include "execedit/benchmark_builder.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "execedit/edit_synthesis.hpp"
#include "execedit/error.hpp"
#include "execedit/hash.hpp"

namespace execedit {

void BalancePolicy::Validate() const {
  if (!(target_ratio > 0.0 && target_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target_ratio must lie in (0, 1)");
  }
  if (per_pair_cap < 1) throw Error(ErrorCode::kInvalidArgument, "per_pair_cap must be >= 1");
}

EditsByPair GroupByPair(const std::vector<ExecutableEdit>& edits) {
  EditsByPair out;
  for (const auto& e : edits) out[PairKey{e.doc_id, e.summary_id}].push_back(e);
  return out;
}

std::size_t ConsistentCountFor(std::size_t n_inconsistent, double ratio, std::size_t pool_size) {
  if (n_inconsistent == 0) throw Error(ErrorCode::kEmptyInput, "no inconsistent samples");
  const auto target = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_inconsistent) * (1.0 - ratio) / ratio));
  if (pool_size >= target) return target;
  const double total = static_cast<double>(n_inconsistent + pool_size);
  if (pool_size > 0 &&
      std::abs(static_cast<double>(n_inconsistent) / total - ratio) <= 1.0 / total) {
    return pool_size;
  }
  throw Error(ErrorCode::kInsufficientConsistentPool,
              "need " + std::to_string(target) + " consistent summaries, pool has " +
                  std::to_string(pool_size));
}

std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // Unbiased draw from [0, i) by rejection.
    const std::uint64_t range = i;
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t x;
    do {
      x = rng();
    } while (x < threshold);
    std::swap(perm[i - 1], perm[x % range]);
  }
  return perm;
}

std::vector<BenchmarkSample> AssembleBenchmark(const EditsByPair& kept_edits,
                                               const std::vector<SeedSummary>& seeds,
                                               const std::vector<DocumentRecord>& documents,
                                               const std::vector<SeedSummary>& consistent_pool,
                                               const BalancePolicy& policy) {
  policy.Validate();
  std::map<std::string, const DocumentRecord*> docs;
  for (const auto& d : documents) docs.emplace(d.doc_id, &d);
  std::map<PairKey, const SeedSummary*> seed_by_pair;
  for (const auto& s : seeds) seed_by_pair.emplace(PairKey{s.doc_id, s.summary_id}, &s);

  auto domain_of = [&](const std::string& doc_id) -> const std::string& {
    const auto it = docs.find(doc_id);
    if (it == docs.end()) throw Error(ErrorCode::kInvalidArgument, "unknown doc_id '" + doc_id + "'");
    return it->second->domain;
  };

  std::vector<BenchmarkSample> out;
  std::map<std::string, std::size_t> inconsistent_by_domain;
  std::set<std::string> edited_texts;
  for (const auto& [key, edits] : kept_edits) {
    if (edits.empty()) continue;
    const auto seed_it = seed_by_pair.find(key);
    if (seed_it == seed_by_pair.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no seed summary for (" + key.doc_id + ", " + key.summary_id + ")");
    }
    const std::string& domain = domain_of(key.doc_id);
    const std::size_t take = std::min(edits.size(), static_cast<std::size_t>(policy.per_pair_cap));
    for (std::size_t i = 0; i < take; ++i) {
      const ExecutableEdit& edit = edits[i];
      BenchmarkSample s;
      s.sample_id = ContentId({"inconsistent", edit.edit_id});
      s.domain = domain;
      s.doc_id = key.doc_id;
      s.summary_id = key.summary_id;
      s.summary_text = ApplyEdit(*seed_it->second, edit);
      s.label = Label::kInconsistent;
      s.edit = edit;
      s.reference_explanation = edit.explanation;
      edited_texts.insert(s.summary_text);
      ++inconsistent_by_domain[domain];
      out.push_back(std::move(s));
    }
  }
  const std::size_t n_inconsistent = out.size();
  if (n_inconsistent == 0) throw Error(ErrorCode::kEmptyInput, "no kept edits to assemble");

  std::vector<const SeedSummary*> pool;
  std::set<std::string> seen;
  for (const auto& s : consistent_pool) {
    if (edited_texts.contains(s.text)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "consistent summary " + s.summary_id + " equals an edited summary");
    }
    domain_of(s.doc_id);
    if (seen.insert(FieldsHash({s.doc_id, s.summary_id, s.text})).second) pool.push_back(&s);
  }
  const std::size_t n_consistent =
      ConsistentCountFor(n_inconsistent, policy.target_ratio, pool.size());

  const std::vector<std::size_t> order = SeededPermutation(pool.size(), policy.seed);
  std::vector<bool> used(pool.size(), false);
  std::vector<std::size_t> chosen;
  // Per-domain quotas proportional to the inconsistent counts, floored.
  for (const auto& [domain, count] : inconsistent_by_domain) {
    std::size_t quota = n_consistent * count / n_inconsistent;
    for (std::size_t idx : order) {
      if (quota == 0) break;
      if (!used[idx] && domain_of(pool[idx]->doc_id) == domain) {
        used[idx] = true;
        chosen.push_back(idx);
        --quota;
      }
    }
  }
  for (std::size_t idx : order) {
    if (chosen.size() >= n_consistent) break;
    if (!used[idx]) {
      used[idx] = true;
      chosen.push_back(idx);
    }
  }
  for (std::size_t idx : chosen) {
    const SeedSummary& s = *pool[idx];
    BenchmarkSample c;
    c.sample_id = ContentId({"consistent", s.doc_id, s.summary_id, s.text});
    c.domain = domain_of(s.doc_id);
    c.doc_id = s.doc_id;
    c.summary_id = s.summary_id;
    c.summary_text = s.text;
    c.label = Label::kConsistent;
    out.push_back(std::move(c));
  }
  return out;
}

double RoundHalfUp(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The epsilon absorbs representation error such as 2.675 -> 2.67499999.
  const double scaled = std::abs(value) * scale;
  const double rounded = std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, scaled)) / scale;
  return std::copysign(rounded, value);
}

DomainStats ComputeDomainStats(const std::vector<BenchmarkSample>& samples) {
  DomainStats stats;
  std::map<std::string, std::size_t> index;
  for (const auto& s : samples) {
    auto [it, inserted] = index.emplace(s.domain, stats.rows.size());
    if (inserted) stats.rows.push_back(DomainStatsRow{s.domain});
    DomainStatsRow& row = stats.rows[it->second];
    ++row.n;
    ++stats.total.n;
    if (s.label == Label::kInconsistent) {
      ++row.n_inconsistent;
      ++stats.total.n_inconsistent;
    }
  }
  auto pct = [](const DomainStatsRow& r) {
    return r.n == 0 ? 0.0 : RoundHalfUp(100.0 * static_cast<double>(r.n_inconsistent) /
                                            static_cast<double>(r.n), 2);
  };
  for (auto& r : stats.rows) r.pct_inconsistent = pct(r);
  stats.total.pct_inconsistent = pct(stats.total);
  return stats;
}

std::string FormatDomainStats(const DomainStats& stats) {
  std::size_t width = 6;
  for (const auto& r : stats.rows) width = std::max(width, r.domain.size());
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s %8s %14s\n", static_cast<int>(width), "Domain", "N",
                "%Inconsistent");
  os << line;
  auto emit = [&](const DomainStatsRow& r) {
    std::snprintf(line, sizeof line, "%-*s %8zu %14.2f\n", static_cast<int>(width),
                  r.domain.c_str(), r.n, r.pct_inconsistent);
    os << line;
  };
  for (const auto& r : stats.rows) emit(r);
  emit(stats.total);
  return os.str();
}

Json DomainStatsToJson(const DomainStats& stats) {
  auto row = [](const DomainStatsRow& r) {
    return Json{{"domain", r.domain},
                {"n", r.n},
                {"n_inconsistent", r.n_inconsistent},
                {"pct_inconsistent", r.pct_inconsistent}};
  };
  Json rows = Json::array();
  for (const auto& r : stats.rows) rows.push_back(row(r));
  return Json{{"rows", rows}, {"total", row(stats.total)}};
}

}  // namespace execedit
