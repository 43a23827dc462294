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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "execedit/gateway.hpp"
#include "execedit/model.hpp"
#include "execedit/prompt_template.hpp"

namespace execedit {

struct DetectionConfig {
  std::string backend;
  std::string model;
  double temperature = kEvaluationTemperature;
  int max_tokens = 1024;
  int concurrency = 1;
};

struct ParsedDetection {
  Verdict verdict = Verdict::kUnparsable;
  std::optional<std::string> explanation;
};

// D&E: "consistent" must be yes/no after trimming, any case. E|D: the
// verdict is presupposed inconsistent and "explanation" is taken as-is
// (empty when missing). Anything without a JSON object is unparsable, and an
// unparsable verdict never carries an explanation.
ParsedDetection ParseDetectionResponse(std::string_view raw, PromptKind kind);

const PromptTemplate& DetectionTemplate(const TemplateLibrary& library, PromptKind kind);

// Samples submitted for `kind`: every sample for D&E, only inconsistent ones
// for E|D.
std::vector<const BenchmarkSample*> SubmittedSamples(
    const std::vector<BenchmarkSample>& samples, PromptKind kind);

// One response per submitted sample, in benchmark order. Gateway failures
// become unparsable responses; detection calls are never re-asked.
std::vector<DetectionResponse> EvaluateDetection(
    Gateway& gateway, const TemplateLibrary& library,
    const std::vector<BenchmarkSample>& samples,
    const std::map<std::string, DocumentRecord>& documents, PromptKind kind,
    const DetectionConfig& config);

}  // namespace execedit
