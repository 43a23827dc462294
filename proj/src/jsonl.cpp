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

#include "execedit/jsonl.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "execedit/error.hpp"

namespace execedit {

namespace fs = std::filesystem;

std::string SerializeJsonl(const JsonlHeader& header, const std::vector<Json>& records) {
  std::string out;
  Json h{{"schema_version", header.schema_version}, {"kind", header.kind}};
  if (!header.manifest.empty()) h["manifest"] = header.manifest;
  out += h.dump();
  out += '\n';
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

void WriteFileAtomic(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
  fs::rename(tmp, path);
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void AppendDurable(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(ErrorCode::kIo, "append failed for " + path.string());
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

void WriteJsonlFile(const fs::path& path, const JsonlHeader& header,
                    const std::vector<Json>& records) {
  WriteFileAtomic(path, SerializeJsonl(header, records));
}

JsonlContents ParseJsonl(std::string_view text, std::string_view expected_kind) {
  JsonlContents out;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (!j.is_object() || !j.contains("schema_version")) {
        throw Error(ErrorCode::kParse, "first line must be a schema_version header");
      }
      out.header.schema_version = j.at("schema_version").get<int>();
      out.header.kind = j.value("kind", "");
      out.header.manifest = j.value("manifest", "");
      if (out.header.schema_version != kSchemaVersion) {
        throw Error(ErrorCode::kParse, "unsupported schema_version " +
                                           std::to_string(out.header.schema_version));
      }
      if (!expected_kind.empty() && out.header.kind != expected_kind) {
        throw Error(ErrorCode::kParse, "expected a '" + std::string(expected_kind) +
                                           "' file, got '" + out.header.kind + "'");
      }
      have_header = true;
      continue;
    }
    out.records.push_back(std::move(j));
  }
  if (!have_header) throw Error(ErrorCode::kParse, "empty JSONL file");
  return out;
}

JsonlContents ReadJsonlFile(const fs::path& path, std::string_view expected_kind) {
  try {
    return ParseJsonl(ReadFile(path), expected_kind);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace execedit
