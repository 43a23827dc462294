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

#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

namespace execedit {

// Pulls the first balanced top-level JSON object out of a model reply.
// Code fences and any prose around the object are ignored; braces inside
// string literals do not count toward balance. Throws kUnparsable when no
// balanced object exists or the first one fails to parse.
nlohmann::json ExtractJsonObject(std::string_view raw);

// Non-throwing variant.
std::optional<nlohmann::json> TryExtractJsonObject(std::string_view raw);

}  // namespace execedit
