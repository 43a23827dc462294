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

// Provider-agnostic completion gateway: backend registry, content-addressed
// response cache, retry with exponential backoff, a per-run call budget, and
// bounded parallel batches that return results in submission order.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "execedit/error.hpp"

namespace execedit {

struct CompletionRequest {
  std::string backend_name;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string request_tag;  // audit/scripting label; not part of the cache key
};

struct CompletionResult {
  std::string text;
  std::string backend_name;
  bool cached = false;
  double latency_ms = 0.0;
};

// Backends throw TransientBackendError for failures worth retrying (rate
// limits, timeouts, 5xx) and Error(kBackendUnavailable) for the rest.
class TransientBackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string Complete(const CompletionRequest& request) = 0;
  // Identifies what answers behind this backend (endpoint, model) so that
  // caches shared across runs keep them apart.
  virtual std::string CacheScope() const { return {}; }
};

// Cache key: hash over (backend_name, scope, prompt, temperature, max_tokens).
std::string CacheKey(const CompletionRequest& request, std::string_view scope = {});

// Response cache. With a directory, entries are files <dir>/<key[0:2]>/<key>.json
// written via temp-file-then-rename; without one it is memory only.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir = {});

  std::optional<std::string> Lookup(const std::string& key) const;
  void Store(const std::string& key, const CompletionRequest& request,
             const std::string& text);
  std::size_t size() const;

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::string> memory_;
};

// Blocking token bucket. rate <= 0 disables limiting.
class TokenBucket {
 public:
  TokenBucket(double rate_per_second, double burst);
  void Acquire();

 private:
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

struct BackendLimits {
  int max_concurrency = 4;
  double requests_per_second = 0.0;  // 0 = unlimited
  double burst = 1.0;
};

struct GatewayOptions {
  int max_retries = 3;  // attempts = 1 + max_retries
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  std::int64_t max_calls = 0;  // backend calls per run; 0 = unlimited
  std::filesystem::path cache_dir;
  bool use_cache = true;
};

class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  void RegisterBackend(const std::string& name, std::shared_ptr<Backend> backend,
                       BackendLimits limits = {});
  bool HasBackend(const std::string& name) const;

  // Errors: kBackendUnavailable, kRetriesExhausted, kBudgetExceeded,
  // kInvalidArgument (empty prompt, negative temperature, max_tokens < 1).
  CompletionResult Complete(const CompletionRequest& request);

  using Outcome = std::variant<CompletionResult, Error>;

  // Runs requests on up to `concurrency` worker threads. outcomes[i]
  // corresponds to requests[i] regardless of completion order.
  std::vector<Outcome> CompleteBatch(const std::vector<CompletionRequest>& requests,
                                     int concurrency);

  std::int64_t backend_calls() const { return backend_calls_.load(); }
  std::int64_t cache_hits() const { return cache_hits_.load(); }
  const ResponseCache& cache() const { return cache_; }

 private:
  class Slot;
  struct Registered;

  Registered& Find(const std::string& name);
  std::string CallWithRetry(Registered& backend, const CompletionRequest& request);

  GatewayOptions options_;
  ResponseCache cache_;
  mutable std::mutex registry_mu_;
  std::map<std::string, std::unique_ptr<Registered>> backends_;
  std::atomic<std::int64_t> backend_calls_{0};
  std::atomic<std::int64_t> cache_hits_{0};
};

// Result of a JSON-returning call, including the optional re-ask.
struct JsonCallResult {
  std::optional<nlohmann::json> value;
  std::vector<std::string> raw;  // every reply received, in order
  bool reasked = false;
  std::optional<Error> failure;  // gateway failure that ended the call
};

inline constexpr std::string_view kJsonReminder = "Return only valid JSON.";

// Completes `request` and extracts a JSON object from the reply. When the
// reply is unparsable and `reask` is set, sends the prompt once more with the
// reminder line appended. Gateway errors are captured, never thrown.
JsonCallResult CompleteJson(Gateway& gateway, const CompletionRequest& request,
                            bool reask);

template <typename T>
struct ParsedCallResult {
  std::optional<T> value;
  std::vector<std::string> raw;
  bool reasked = false;
  std::optional<Error> failure;
};

// Like CompleteJson, but the re-ask also fires when `parse` rejects a reply
// by throwing Error.
template <typename Parse>
auto CompleteParsed(Gateway& gateway, const CompletionRequest& request, Parse parse)
    -> ParsedCallResult<std::invoke_result_t<Parse&, const std::string&>> {
  ParsedCallResult<std::invoke_result_t<Parse&, const std::string&>> out;
  CompletionRequest current = request;
  for (int round = 0; round < 2; ++round) {
    if (round == 1) {
      current.prompt = request.prompt + "\n\n" + std::string(kJsonReminder);
      out.reasked = true;
    }
    try {
      out.raw.push_back(gateway.Complete(current).text);
    } catch (const Error& e) {
      out.failure = e;
      return out;
    }
    try {
      out.value.emplace(parse(out.raw.back()));
      return out;
    } catch (const Error&) {
    }
  }
  return out;
}

// Temperatures used by each pipeline stage.
inline constexpr double kGenerationTemperature = 0.7;
inline constexpr double kEvaluationTemperature = 0.0;

}  // namespace execedit
