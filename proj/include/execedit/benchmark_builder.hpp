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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "execedit/model.hpp"

namespace execedit {

struct BalancePolicy {
  double target_ratio = 0.5;  // fraction of inconsistent samples
  int per_pair_cap = 2;
  std::uint64_t seed = 0;

  void Validate() const;  // kInvalidArgument
};

struct PairKey {
  std::string doc_id;
  std::string summary_id;
  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

using EditsByPair = std::map<PairKey, std::vector<ExecutableEdit>>;
EditsByPair GroupByPair(const std::vector<ExecutableEdit>& edits);

// Number of consistent samples to draw for `n_inconsistent` at `ratio`:
// round(n * (1 - ratio) / ratio). A smaller pool is accepted when using all of
// it still keeps |n/total - ratio| <= 1/total; otherwise
// kInsufficientConsistentPool.
std::size_t ConsistentCountFor(std::size_t n_inconsistent, double ratio,
                               std::size_t pool_size);

// Builds the benchmark: up to per_pair_cap inconsistent samples per pair (in
// the order edits were proposed), then consistent samples drawn with a seeded
// shuffle, allotted to domains in proportion to their inconsistent counts and
// topped up from the remaining pool.
// Errors: kEmptyInput, kInsufficientConsistentPool, kInvalidEdit,
// kInvalidArgument (unknown doc/summary ids, pool entry equal to an edited
// summary).
std::vector<BenchmarkSample> AssembleBenchmark(const EditsByPair& kept_edits,
                                               const std::vector<SeedSummary>& seeds,
                                               const std::vector<DocumentRecord>& documents,
                                               const std::vector<SeedSummary>& consistent_pool,
                                               const BalancePolicy& policy);

struct DomainStatsRow {
  std::string domain;
  std::size_t n = 0;
  std::size_t n_inconsistent = 0;
  double pct_inconsistent = 0.0;  // rounded half-up to 2 decimals

  friend bool operator==(const DomainStatsRow&, const DomainStatsRow&) = default;
};

struct DomainStats {
  std::vector<DomainStatsRow> rows;  // domains in order of first appearance
  DomainStatsRow total{"Total"};
};

DomainStats ComputeDomainStats(const std::vector<BenchmarkSample>& samples);
std::string FormatDomainStats(const DomainStats& stats);
Json DomainStatsToJson(const DomainStats& stats);

double RoundHalfUp(double value, int decimals);

// Fisher-Yates driven by a 64-bit Mersenne Twister; the draw sequence is
// fully specified so results are identical across standard libraries.
std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed);

}  // namespace execedit
