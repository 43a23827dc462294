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

#include "execedit/prompt_template.hpp"

#include <cctype>

#include "execedit/error.hpp"
#include "execedit/hash.hpp"
#include "execedit/jsonl.hpp"

namespace execedit {
namespace {

bool IsTokenChar(char c, bool first) {
  if (c >= 'A' && c <= 'Z') return true;
  if (first) return false;
  return (c >= '0' && c <= '9') || c == '_';
}

// Length of the [UPPER_SNAKE] token starting at body[pos] ('['), or 0.
std::size_t TokenLengthAt(std::string_view body, std::size_t pos) {
  if (body[pos] != '[') return 0;
  std::size_t i = pos + 1;
  while (i < body.size() && IsTokenChar(body[i], i == pos + 1)) ++i;
  if (i == pos + 1 || i >= body.size() || body[i] != ']') return 0;
  return i - pos + 1;
}

std::set<std::string> ScanPlaceholders(std::string_view body) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (const std::size_t len = TokenLengthAt(body, i)) {
      out.emplace(body.substr(i + 1, len - 2));
      i += len - 1;
    }
  }
  return out;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string body)
    : name_(std::move(name)), body_(std::move(body)), required_(ScanPlaceholders(body_)) {}

PromptTemplate::PromptTemplate(std::string name, std::string body,
                               std::set<std::string> required_placeholders)
    : name_(std::move(name)), body_(std::move(body)), required_(std::move(required_placeholders)) {
  for (const auto& token : required_) {
    if (body_.find("[" + token + "]") == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "template '" + name_ + "' lacks placeholder [" + token + "]");
    }
  }
}

std::string PromptTemplate::Hash() const { return Sha256Hex(body_); }

std::string RenderTemplate(const PromptTemplate& tmpl, const Bindings& bindings) {
  for (const auto& token : tmpl.required_placeholders()) {
    if (!bindings.contains(token)) throw Error(ErrorCode::kMissingBinding, token);
  }
  for (const auto& [token, value] : bindings) {
    if (!tmpl.required_placeholders().contains(token)) {
      throw Error(ErrorCode::kUnknownBinding, token);
    }
  }
  const std::string_view body = tmpl.body();
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size();) {
    if (const std::size_t len = TokenLengthAt(body, i)) {
      const auto it = bindings.find(std::string(body.substr(i + 1, len - 2)));
      if (it != bindings.end()) {
        out += it->second;
        i += len;
        continue;
      }
    }
    out += body[i++];
  }
  return out;
}

TemplateLibrary TemplateLibrary::Builtin() {
  TemplateLibrary lib;
  for (const auto& [name, body] : BuiltinTemplateSources()) {
    lib.Add(PromptTemplate(std::string(name), std::string(body)));
  }
  return lib;
}

TemplateLibrary TemplateLibrary::FromDirectory(const std::filesystem::path& dir) {
  TemplateLibrary lib;
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "template directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      lib.Add(PromptTemplate(entry.path().stem().string(), ReadFile(entry.path())));
    }
  }
  return lib;
}

TemplateLibrary TemplateLibrary::Load(const std::filesystem::path& dir) {
  TemplateLibrary lib = Builtin();
  if (!dir.empty()) {
    for (auto& [name, tmpl] : FromDirectory(dir).templates_) lib.Add(tmpl);
  }
  return lib;
}

void TemplateLibrary::Add(PromptTemplate tmpl) {
  std::string name = tmpl.name();
  templates_.insert_or_assign(std::move(name), std::move(tmpl));
}

const PromptTemplate& TemplateLibrary::Get(std::string_view name) const {
  const auto it = templates_.find(name);
  if (it == templates_.end()) throw Error(ErrorCode::kUnknownTemplate, std::string(name));
  return it->second;
}

bool TemplateLibrary::Contains(std::string_view name) const {
  return templates_.find(name) != templates_.end();
}

std::map<std::string, std::string> TemplateLibrary::Hashes() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, tmpl] : templates_) out.emplace(name, tmpl.Hash());
  return out;
}

}  // namespace execedit
