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

#include "convrec/templates.hpp"

#include <algorithm>
#include <fstream>

#include "text_util.hpp"

namespace convrec {

namespace {

void replace_all(std::string& s, std::string_view key, const std::string& value) {
  for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
    s.replace(pos, key.size(), value);
}

}  // namespace

QuestionTemplates::QuestionTemplates(std::string domain, std::optional<std::string> fallback)
    : domain_(std::move(domain)), fallback_(std::move(fallback)) {}

QuestionTemplates QuestionTemplates::load(const std::filesystem::path& path, std::string domain,
                                          std::optional<std::string> fallback) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot open template file " + path.string());
  QuestionTemplates out(std::move(domain), std::move(fallback));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    const auto body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw TemplateError(path.string() + ":" + std::to_string(lineno) +
                          ": expected relation<TAB>template");
    const auto rel = std::string(detail::trim(std::string_view(line).substr(0, tab)));
    const auto text = std::string(detail::trim(std::string_view(line).substr(tab + 1)));
    if (rel.empty() || text.empty())
      throw TemplateError(path.string() + ":" + std::to_string(lineno) + ": empty field");
    out.set(rel, text);
  }
  return out;
}

void QuestionTemplates::set(const std::string& relation, std::string text) {
  texts_[relation] = std::move(text);
}

bool QuestionTemplates::has(const std::string& relation) const {
  return fallback_.has_value() || texts_.contains(relation);
}

std::string QuestionTemplates::render(const std::string& relation) const {
  const auto it = texts_.find(relation);
  if (it == texts_.end() && !fallback_)
    throw TemplateError("no question template for relation '" + relation + "'");
  std::string text = it == texts_.end() ? *fallback_ : it->second;
  std::string spoken = relation;
  std::replace(spoken.begin(), spoken.end(), '_', ' ');
  replace_all(text, "{relation}", spoken);
  replace_all(text, "{domain}", domain_);
  return text;
}

}  // namespace convrec
