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

// JSONL files: a header line {"schema_version", "kind", "manifest"} followed
// by one record per line.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "execedit/model.hpp"

namespace execedit {

inline constexpr int kSchemaVersion = 1;

struct JsonlHeader {
  int schema_version = kSchemaVersion;
  std::string kind;
  std::string manifest;  // name of the run manifest that produced the file
};

std::string SerializeJsonl(const JsonlHeader& header,
                           const std::vector<Json>& records);

// Writes atomically (temp file in the same directory, then rename).
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFile(const std::filesystem::path& path);

// Appends `bytes` and fsyncs before returning. Used by append-only logs.
void AppendDurable(const std::filesystem::path& path, std::string_view bytes);

void WriteJsonlFile(const std::filesystem::path& path, const JsonlHeader& header,
                    const std::vector<Json>& records);

struct JsonlContents {
  JsonlHeader header;
  std::vector<Json> records;
};

// Parses text produced by SerializeJsonl. If `expected_kind` is non-empty the
// header kind must match. Blank lines are skipped.
JsonlContents ParseJsonl(std::string_view text, std::string_view expected_kind = {});
JsonlContents ReadJsonlFile(const std::filesystem::path& path,
                            std::string_view expected_kind = {});

template <typename T>
std::vector<Json> ToJsonRecords(const std::vector<T>& values) {
  std::vector<Json> out;
  out.reserve(values.size());
  for (const auto& v : values) out.emplace_back(v);
  return out;
}

template <typename T>
std::vector<T> FromJsonRecords(const std::vector<Json>& records) {
  std::vector<T> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.template get<T>());
  return out;
}

template <typename T>
void WriteRecords(const std::filesystem::path& path, std::string_view kind,
                  std::string_view manifest, const std::vector<T>& values) {
  WriteJsonlFile(path, JsonlHeader{kSchemaVersion, std::string(kind), std::string(manifest)},
                 ToJsonRecords(values));
}

template <typename T>
std::vector<T> ReadRecords(const std::filesystem::path& path,
                           std::string_view expected_kind = {}) {
  return FromJsonRecords<T>(ReadJsonlFile(path, expected_kind).records);
}

}  // namespace execedit
