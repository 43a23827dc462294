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

#include <cstddef>
#include <string>
#include <string_view>

namespace execedit {

// Unicode NFC normalization of UTF-8 text. Invalid UTF-8 is rejected with
// ErrorCode::kInvalidArgument.
std::string NormalizeNfc(std::string_view utf8);

// Number of non-overlapping occurrences of `needle` in `haystack`.
std::size_t CountOccurrences(std::string_view haystack, std::string_view needle);

std::string Trim(std::string_view s);
std::string ToLowerAscii(std::string_view s);

}  // namespace execedit
