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
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "execedit/gateway.hpp"

namespace execedit {

struct ScriptedReply {
  enum class Kind { kText, kTransientFailure, kPermanentFailure };
  Kind kind = Kind::kText;
  std::string text;

  static ScriptedReply Text(std::string t) { return {Kind::kText, std::move(t)}; }
  static ScriptedReply Transient() { return {Kind::kTransientFailure, {}}; }
  static ScriptedReply Permanent() { return {Kind::kPermanentFailure, {}}; }
};

// Deterministic offline backend. A request is answered by, in order:
//   1. the next queued reply for its request_tag,
//   2. the first substring rule whose needles all occur in the prompt,
//   3. the responder function,
//   4. the default reply.
// A request nothing answers fails with kBackendUnavailable.
class MockBackend : public Backend {
 public:
  using Responder = std::function<std::optional<std::string>(const CompletionRequest&)>;

  MockBackend() = default;

  // Script file shape:
  //   {"tags": {"t1": ["X", {"fail": "transient"}]},
  //    "rules": [{"contains": ["needle", ...], "reply": "text"}],
  //    "default": "text"}
  static std::shared_ptr<MockBackend> FromJson(const nlohmann::json& script);

  void ScriptTag(const std::string& tag, std::vector<ScriptedReply> replies);
  void AddRule(std::vector<std::string> needles, ScriptedReply reply);
  void SetResponder(Responder responder);
  void SetDefault(ScriptedReply reply);

  std::string Complete(const CompletionRequest& request) override;

  std::int64_t calls() const;
  std::vector<CompletionRequest> requests() const;

 private:
  struct Rule {
    std::vector<std::string> needles;
    ScriptedReply reply;
  };

  static std::string Deliver(const ScriptedReply& reply);

  mutable std::mutex mu_;
  std::map<std::string, std::deque<ScriptedReply>> tags_;
  std::vector<Rule> rules_;
  Responder responder_;
  std::optional<ScriptedReply> default_;
  std::vector<CompletionRequest> seen_;
};

}  // namespace execedit
