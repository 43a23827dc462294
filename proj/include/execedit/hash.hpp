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

#include <initializer_list>
#include <string>
#include <string_view>

namespace execedit {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

// Hash of a field tuple. Fields are length-prefixed so ("ab","c") and
// ("a","bc") never collide.
std::string FieldsHash(std::initializer_list<std::string_view> fields);

// Stable identifier: FieldsHash truncated to 16 hex characters.
std::string ContentId(std::initializer_list<std::string_view> fields);

}  // namespace execedit
