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

#include "execedit/json_extract.hpp"

#include "execedit/error.hpp"

namespace execedit {
namespace {

// Drops a leading ```lang line and a trailing ``` fence if present.
std::string_view StripFences(std::string_view s) {
  const std::size_t open = s.find("```");
  if (open == std::string_view::npos) return s;
  const std::size_t body = s.find('\n', open);
  if (body == std::string_view::npos) return s;
  const std::size_t close = s.find("```", body);
  return s.substr(body + 1, (close == std::string_view::npos ? s.size() : close) - body - 1);
}

// [begin, end) of the first balanced {...} in s, honouring string literals.
std::optional<std::pair<std::size_t, std::size_t>> FirstObject(std::string_view s) {
  const std::size_t begin = s.find('{');
  if (begin == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = begin; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return std::make_pair(begin, i + 1);
  }
  return std::nullopt;
}

}  // namespace

std::optional<nlohmann::json> TryExtractJsonObject(std::string_view raw) {
  // Prefer the fenced block when there is one; fall back to the whole reply.
  for (std::string_view candidate : {StripFences(raw), raw}) {
    const auto span = FirstObject(candidate);
    if (!span) continue;
    auto parsed = nlohmann::json::parse(candidate.substr(span->first, span->second - span->first),
                                        nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    return std::nullopt;
  }
  return std::nullopt;
}

nlohmann::json ExtractJsonObject(std::string_view raw) {
  auto parsed = TryExtractJsonObject(raw);
  if (!parsed) {
    throw Error(ErrorCode::kUnparsable,
                "no parsable JSON object in reply: " + std::string(raw.substr(0, 120)));
  }
  return *std::move(parsed);
}

}  // namespace execedit
