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

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace execedit {

// A prompt body with [UPPER_SNAKE] placeholder tokens. Bracketed text that is
// not all upper-case ("[Document]", "[...]") is literal.
class PromptTemplate {
 public:
  // Required placeholders are every [UPPER_SNAKE] token found in `body`.
  PromptTemplate(std::string name, std::string body);

  // Explicit placeholder set; each must occur in `body` (kInvalidArgument).
  PromptTemplate(std::string name, std::string body,
                 std::set<std::string> required_placeholders);

  const std::string& name() const { return name_; }
  const std::string& body() const { return body_; }
  const std::set<std::string>& required_placeholders() const { return required_; }

  // SHA-256 of the body; recorded in run manifests.
  std::string Hash() const;

 private:
  std::string name_;
  std::string body_;
  std::set<std::string> required_;
};

using Bindings = std::map<std::string, std::string>;

// Single-pass substitution of every required placeholder. Bindings must name
// exactly the required set: kMissingBinding / kUnknownBinding otherwise.
// Substituted values are never rescanned.
std::string RenderTemplate(const PromptTemplate& tmpl, const Bindings& bindings);

// Template names shipped with the library.
namespace templates {
inline constexpr std::string_view kExecEdit = "exec_edit";
inline constexpr std::string_view kNonExecEdit = "nonexec_edit";
inline constexpr std::string_view kDetectAndExplain = "detect_and_explain";
inline constexpr std::string_view kExplainGivenDetection = "explain_given_detection";
inline constexpr std::string_view kClassifyTrivial = "classify_trivial";
inline constexpr std::string_view kJudgeV1 = "judge_v1";
inline constexpr std::string_view kJudgeV2 = "judge_v2";
inline constexpr std::string_view kJudgeV3 = "judge_v3";
inline constexpr std::string_view kJudgeV4 = "judge_v4";
inline constexpr std::string_view kClassifyExplanationError = "classify_explanation_error";
}  // namespace templates

// Named templates. Starts with the compiled-in set; a directory of
// <name>.txt files overrides entries by name.
class TemplateLibrary {
 public:
  static TemplateLibrary Builtin();
  static TemplateLibrary FromDirectory(const std::filesystem::path& dir);

  // Builtin() overlaid with the directory's files (when `dir` is non-empty).
  static TemplateLibrary Load(const std::filesystem::path& dir);

  void Add(PromptTemplate tmpl);
  const PromptTemplate& Get(std::string_view name) const;  // kUnknownTemplate
  bool Contains(std::string_view name) const;
  std::map<std::string, std::string> Hashes() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

// Generated from templates/*.txt.
std::span<const std::pair<std::string_view, std::string_view>>
BuiltinTemplateSources();

}  // namespace execedit
