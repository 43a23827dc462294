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

#include "execedit/openai_backend.hpp"

#include <cctype>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "execedit/error.hpp"

namespace execedit {

OpenAiBackend::OpenAiBackend(OpenAiBackendOptions options) : options_(std::move(options)) {}

std::string OpenAiBackend::ApiKeyVariable(const std::string& backend_name) {
  std::string var;
  for (char c : backend_name) {
    var.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return var + "_API_KEY";
}

std::shared_ptr<OpenAiBackend> OpenAiBackend::FromEnvironment(const std::string& backend_name,
                                                              OpenAiBackendOptions options) {
  if (const char* key = std::getenv(ApiKeyVariable(backend_name).c_str())) {
    options.api_key = key;
  }
  return std::make_shared<OpenAiBackend>(std::move(options));
}

std::string OpenAiBackend::CacheScope() const {
  return options_.base_url + options_.path + " " + options_.model;
}

std::string OpenAiBackend::Complete(const CompletionRequest& request) {
  httplib::Client client(options_.base_url);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  const nlohmann::json body{
      {"model", options_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens}};

  const auto res = client.Post(options_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransientBackendError("request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientBackendError("HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw TransientBackendError("malformed response body");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kBackendUnavailable, "response has no choices[0].message.content");
  }
}

}  // namespace execedit
