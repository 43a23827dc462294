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

#include "execedit/gateway.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "execedit/hash.hpp"
#include "execedit/json_extract.hpp"
#include "execedit/jsonl.hpp"
#include "execedit/parallel.hpp"

namespace execedit {

namespace fs = std::filesystem;

std::string CacheKey(const CompletionRequest& request, std::string_view scope) {
  // %.17g keeps every bit of the temperature.
  char temperature[40];
  std::snprintf(temperature, sizeof temperature, "%.17g", request.temperature);
  return FieldsHash({request.backend_name, scope, request.prompt, temperature,
                     std::to_string(request.max_tokens)});
}

// ---------------------------------------------------------------------------
// ResponseCache
// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {}

std::optional<std::string> ResponseCache::Lookup(const std::string& key) const {
  {
    std::shared_lock lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  if (dir_.empty()) return std::nullopt;
  const fs::path path = dir_ / key.substr(0, 2) / (key + ".json");
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    const Json entry = Json::parse(ReadFile(path));
    std::string text = entry.at("text").get<std::string>();
    std::unique_lock lock(mu_);
    memory_.emplace(key, text);
    return text;
  } catch (const std::exception& e) {
    spdlog::warn("ignoring unreadable cache entry {}: {}", path.string(), e.what());
    return std::nullopt;
  }
}

void ResponseCache::Store(const std::string& key, const CompletionRequest& request,
                          const std::string& text) {
  if (!dir_.empty()) {
    const Json entry{{"key", key},
                     {"backend_name", request.backend_name},
                     {"temperature", request.temperature},
                     {"max_tokens", request.max_tokens},
                     {"prompt", request.prompt},
                     {"text", text}};
    WriteFileAtomic(dir_ / key.substr(0, 2) / (key + ".json"), entry.dump(2));
  }
  std::unique_lock lock(mu_);
  memory_.insert_or_assign(key, text);
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return memory_.size();
}

// ---------------------------------------------------------------------------
// TokenBucket
// ---------------------------------------------------------------------------

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::Acquire() {
  if (rate_ <= 0.0) return;
  for (;;) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      tokens_ = std::min(burst_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    }
    std::this_thread::sleep_for(wait);
  }
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

// Counting semaphore bounding in-flight calls to one backend.
class Gateway::Slot {
 public:
  explicit Slot(int capacity) : available_(std::max(1, capacity)) {}

  void Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
  }

  void Release() {
    {
      std::lock_guard lock(mu_);
      ++available_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int available_;
};

struct Gateway::Registered {
  std::shared_ptr<Backend> backend;
  Slot slot;
  TokenBucket bucket;

  Registered(std::shared_ptr<Backend> b, const BackendLimits& limits)
      : backend(std::move(b)),
        slot(limits.max_concurrency),
        bucket(limits.requests_per_second, limits.burst) {}
};

Gateway::Gateway(GatewayOptions options)
    : options_(std::move(options)), cache_(options_.use_cache ? options_.cache_dir : fs::path{}) {}

Gateway::~Gateway() = default;

void Gateway::RegisterBackend(const std::string& name, std::shared_ptr<Backend> backend,
                              BackendLimits limits) {
  std::lock_guard lock(registry_mu_);
  backends_.insert_or_assign(name, std::make_unique<Registered>(std::move(backend), limits));
}

bool Gateway::HasBackend(const std::string& name) const {
  std::lock_guard lock(registry_mu_);
  return backends_.contains(name);
}

Gateway::Registered& Gateway::Find(const std::string& name) {
  std::lock_guard lock(registry_mu_);
  const auto it = backends_.find(name);
  if (it == backends_.end()) {
    throw Error(ErrorCode::kBackendUnavailable, "no backend registered as '" + name + "'");
  }
  return *it->second;
}

std::string Gateway::CallWithRetry(Registered& backend, const CompletionRequest& request) {
  auto delay = options_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (backend_calls_.fetch_add(1) >= options_.max_calls && options_.max_calls > 0) {
      backend_calls_.fetch_sub(1);
      throw Error(ErrorCode::kBudgetExceeded,
                  "call budget of " + std::to_string(options_.max_calls) + " exhausted");
    }
    backend.bucket.Acquire();
    backend.slot.Acquire();
    try {
      std::string text = backend.backend->Complete(request);
      backend.slot.Release();
      return text;
    } catch (const TransientBackendError& e) {
      backend.slot.Release();
      last_error = e.what();
      spdlog::debug("transient failure from '{}' (attempt {}): {}", request.backend_name,
                    attempt + 1, last_error);
    } catch (...) {
      backend.slot.Release();
      throw;
    }
    if (attempt < options_.max_retries && delay.count() > 0) {
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<std::int64_t>(std::llround(delay.count() * options_.backoff_multiplier)));
    }
  }
  throw Error(ErrorCode::kRetriesExhausted,
              std::to_string(options_.max_retries + 1) + " attempts failed; last: " + last_error);
}

CompletionResult Gateway::Complete(const CompletionRequest& request) {
  if (request.prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "empty prompt");
  if (!(request.temperature >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature < 0");
  if (request.max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens < 1");

  Registered& backend = Find(request.backend_name);
  const auto start = std::chrono::steady_clock::now();
  const std::string key = CacheKey(request, backend.backend->CacheScope());
  if (options_.use_cache) {
    if (auto hit = cache_.Lookup(key)) {
      cache_hits_.fetch_add(1);
      return CompletionResult{*std::move(hit), request.backend_name, true, 0.0};
    }
  }
  std::string text = CallWithRetry(backend, request);
  if (options_.use_cache) cache_.Store(key, request, text);
  const double latency =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return CompletionResult{std::move(text), request.backend_name, false, latency};
}

std::vector<Gateway::Outcome> Gateway::CompleteBatch(
    const std::vector<CompletionRequest>& requests, int concurrency) {
  return ParallelMap(requests.size(), concurrency, [&](std::size_t i) -> Outcome {
    try {
      return Complete(requests[i]);
    } catch (const Error& e) {
      return e;
    }
  });
}

JsonCallResult CompleteJson(Gateway& gateway, const CompletionRequest& request, bool reask) {
  JsonCallResult out;
  CompletionRequest current = request;
  for (int round = 0; round < (reask ? 2 : 1); ++round) {
    if (round == 1) {
      current.prompt = request.prompt + "\n\n" + std::string(kJsonReminder);
      out.reasked = true;
    }
    try {
      CompletionResult result = gateway.Complete(current);
      out.raw.push_back(result.text);
      if (auto parsed = TryExtractJsonObject(result.text)) {
        out.value = std::move(parsed);
        return out;
      }
    } catch (const Error& e) {
      out.failure = e;
      return out;
    }
  }
  return out;
}

}  // namespace execedit
