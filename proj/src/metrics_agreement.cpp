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

#include <numeric>

#include "execedit/metrics.hpp"

namespace execedit {
namespace {

double Pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw Error(ErrorCode::kConstantVector, "correlation");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

template <typename F>
std::optional<double> Optional(F f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConstantVector || e.code() == ErrorCode::kEmptyInput) {
      return std::nullopt;
    }
    throw;
  }
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Correlation(std::span<const double> a, std::span<const double> b, CorrelationKind kind) {
  if (a.size() != b.size()) throw Error(ErrorCode::kLengthMismatch, "correlation");
  if (a.size() < 2) throw Error(ErrorCode::kEmptyInput, "correlation needs at least 2 points");
  if (kind == CorrelationKind::kPearson) return Pearson(a, b);
  const std::vector<double> ra = AverageRanks(a);
  const std::vector<double> rb = AverageRanks(b);
  return Pearson(ra, rb);
}

AgreementReport RaterAgreement(std::span<const double> a, std::span<const double> b) {
  AgreementReport r;
  r.n = a.size();
  r.cohen_kappa = CohenKappa(a, b);
  r.pearson_r = Optional([&] { return Correlation(a, b, CorrelationKind::kPearson); });
  r.spearman_rho = Optional([&] { return Correlation(a, b, CorrelationKind::kSpearman); });
  return r;
}

AgreementReport CalibrationReport(std::span<const double> judge, std::span<const double> manual) {
  AgreementReport r = RaterAgreement(judge, manual);
  r.balanced_accuracy = BalancedAccuracy(judge, manual);
  return r;
}

Json AgreementToJson(const AgreementReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"n", report.n},
              {"cohen_kappa", report.cohen_kappa},
              {"pearson_r", opt(report.pearson_r)},
              {"spearman_rho", opt(report.spearman_rho)},
              {"balanced_accuracy", opt(report.balanced_accuracy)}};
}

}  // namespace execedit
