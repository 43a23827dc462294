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

#include "execedit/mock_backend.hpp"

#include "execedit/error.hpp"

namespace execedit {
namespace {

ScriptedReply ReplyFromJson(const nlohmann::json& j) {
  if (j.is_string()) return ScriptedReply::Text(j.get<std::string>());
  if (j.is_object() && j.contains("fail")) {
    return j.at("fail").get<std::string>() == "permanent" ? ScriptedReply::Permanent()
                                                          : ScriptedReply::Transient();
  }
  if (j.is_object() && j.contains("text")) return ScriptedReply::Text(j.at("text").get<std::string>());
  throw Error(ErrorCode::kParse, "bad scripted reply: " + j.dump());
}

}  // namespace

std::shared_ptr<MockBackend> MockBackend::FromJson(const nlohmann::json& script) {
  auto mock = std::make_shared<MockBackend>();
  if (const auto it = script.find("tags"); it != script.end()) {
    for (const auto& [tag, replies] : it->items()) {
      std::vector<ScriptedReply> queue;
      if (replies.is_array()) {
        for (const auto& r : replies) queue.push_back(ReplyFromJson(r));
      } else {
        queue.push_back(ReplyFromJson(replies));
      }
      mock->ScriptTag(tag, std::move(queue));
    }
  }
  if (const auto it = script.find("rules"); it != script.end()) {
    for (const auto& rule : *it) {
      std::vector<std::string> needles;
      const auto& contains = rule.at("contains");
      if (contains.is_string()) {
        needles.push_back(contains.get<std::string>());
      } else {
        for (const auto& n : contains) needles.push_back(n.get<std::string>());
      }
      mock->AddRule(std::move(needles), ReplyFromJson(rule.at("reply")));
    }
  }
  if (const auto it = script.find("default"); it != script.end()) {
    mock->SetDefault(ReplyFromJson(*it));
  }
  return mock;
}

void MockBackend::ScriptTag(const std::string& tag, std::vector<ScriptedReply> replies) {
  std::lock_guard lock(mu_);
  auto& queue = tags_[tag];
  for (auto& r : replies) queue.push_back(std::move(r));
}

void MockBackend::AddRule(std::vector<std::string> needles, ScriptedReply reply) {
  std::lock_guard lock(mu_);
  rules_.push_back(Rule{std::move(needles), std::move(reply)});
}

void MockBackend::SetResponder(Responder responder) {
  std::lock_guard lock(mu_);
  responder_ = std::move(responder);
}

void MockBackend::SetDefault(ScriptedReply reply) {
  std::lock_guard lock(mu_);
  default_ = std::move(reply);
}

std::string MockBackend::Deliver(const ScriptedReply& reply) {
  switch (reply.kind) {
    case ScriptedReply::Kind::kText: return reply.text;
    case ScriptedReply::Kind::kTransientFailure:
      throw TransientBackendError("scripted transient failure");
    case ScriptedReply::Kind::kPermanentFailure:
      throw Error(ErrorCode::kBackendUnavailable, "scripted permanent failure");
  }
  return {};
}

std::string MockBackend::Complete(const CompletionRequest& request) {
  Responder responder;
  {
    std::lock_guard lock(mu_);
    seen_.push_back(request);
    if (auto it = tags_.find(request.request_tag); it != tags_.end() && !it->second.empty()) {
      ScriptedReply reply = std::move(it->second.front());
      it->second.pop_front();
      return Deliver(reply);
    }
    for (const auto& rule : rules_) {
      bool all = true;
      for (const auto& needle : rule.needles) {
        if (request.prompt.find(needle) == std::string::npos) {
          all = false;
          break;
        }
      }
      if (all) return Deliver(rule.reply);
    }
    responder = responder_;
  }
  if (responder) {
    if (auto text = responder(request)) return *std::move(text);
  }
  std::lock_guard lock(mu_);
  if (default_) return Deliver(*default_);
  throw Error(ErrorCode::kBackendUnavailable,
              "mock has no reply for tag '" + request.request_tag + "'");
}

std::int64_t MockBackend::calls() const {
  std::lock_guard lock(mu_);
  return static_cast<std::int64_t>(seen_.size());
}

std::vector<CompletionRequest> MockBackend::requests() const {
  std::lock_guard lock(mu_);
  return seen_;
}

}  // namespace execedit
