// Copyright 2026 The convrec Authors.
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
#include <optional>
#include <stdexcept>
#include <string>

namespace convrec {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kDefaultQuestionTemplate =
    "What is your preference on the {relation} of the {domain}?";

// Clarifying-question texts keyed by relation name. `{relation}` and
// `{domain}` are substituted on render; underscores in relation names read as
// spaces.
class QuestionTemplates {
 public:
  explicit QuestionTemplates(std::string domain = "movie",
                             std::optional<std::string> fallback = kDefaultQuestionTemplate);

  // File lines are `relation<TAB>template`; blank lines and `#` comments are
  // skipped.
  static QuestionTemplates load(const std::filesystem::path& path, std::string domain,
                                std::optional<std::string> fallback = kDefaultQuestionTemplate);

  void set(const std::string& relation, std::string text);
  bool has(const std::string& relation) const;

  // Throws TemplateError when the relation has no template and there is no
  // fallback.
  std::string render(const std::string& relation) const;

  const std::string& domain() const { return domain_; }

 private:
  std::string domain_;
  std::optional<std::string> fallback_;
  std::map<std::string, std::string> texts_;
};

}  // namespace convrec
