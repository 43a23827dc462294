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

#include <chrono>
#include <memory>
#include <string>

#include "execedit/gateway.hpp"

namespace execedit {

// Chat-completions client for any OpenAI-compatible HTTP endpoint.
struct OpenAiBackendOptions {
  std::string base_url = "https://api.openai.com";  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{120};
};

class OpenAiBackend : public Backend {
 public:
  explicit OpenAiBackend(OpenAiBackendOptions options);

  // api_key is read from the environment variable <BACKEND>_API_KEY, with
  // the backend name upper-cased and '-' mapped to '_'. A missing key is
  // allowed (local servers often need none).
  static std::shared_ptr<OpenAiBackend> FromEnvironment(const std::string& backend_name,
                                                        OpenAiBackendOptions options);

  static std::string ApiKeyVariable(const std::string& backend_name);

  std::string Complete(const CompletionRequest& request) override;
  std::string CacheScope() const override;

 private:
  OpenAiBackendOptions options_;
};

}  // namespace execedit
