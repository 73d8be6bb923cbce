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

#include "convrec/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "text_util.hpp"

namespace convrec {

namespace {

std::vector<std::string_view> words(std::string_view normalized) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < normalized.size()) {
    auto end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    out.push_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string normalize_surface(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool space = false;
  for (unsigned char c : text) {
    // Bytes >= 0x80 belong to UTF-8 sequences and are kept verbatim.
    const bool word = std::isalnum(c) || c >= 0x80;
    if (word) {
      if (space && !out.empty()) out.push_back(' ');
      space = false;
      out.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else {
      space = true;
    }
  }
  return out;
}

Lexicon Lexicon::from_graph(const KnowledgeGraph& kg) {
  Lexicon lex;
  for (std::size_t e = 0; e < kg.num_entities(); ++e) {
    const EntityId id(static_cast<int32_t>(e));
    lex.add(kg.entity_name(id), id);
  }
  return lex;
}

void Lexicon::load_aliases(const std::filesystem::path& path, const KnowledgeGraph& kg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open alias file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::trim(line).empty() || detail::trim(line).front() == '#') continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 2)
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected surface<TAB>entity-name");
    const auto entity = kg.find_entity(detail::trim(fields[1]));
    if (!entity)
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": unknown entity '" +
                      std::string(detail::trim(fields[1])) + "'");
    add(fields[0], *entity);
  }
}

void Lexicon::add(std::string_view surface, EntityId entity) {
  auto key = normalize_surface(surface);
  if (key.empty()) return;
  max_words_ = std::max(max_words_, words(key).size());
  auto& ids = entries_[std::move(key)];
  if (std::find(ids.begin(), ids.end(), entity) == ids.end()) ids.push_back(entity);
}

std::vector<EntityId> Lexicon::link(std::string_view text, std::span<const EntityId> allowed) const {
  const std::string norm = normalize_surface(text);
  const auto toks = words(norm);
  std::vector<EntityId> out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    for (std::size_t n = 1; n <= max_words_ && i + n <= toks.size(); ++n) {
      const auto* begin = toks[i].data();
      const auto* end = toks[i + n - 1].data() + toks[i + n - 1].size();
      const auto it = entries_.find(std::string_view(begin, static_cast<std::size_t>(end - begin)));
      if (it == entries_.end()) continue;
      for (auto e : it->second)
        if (allowed.empty() || std::find(allowed.begin(), allowed.end(), e) != allowed.end())
          out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace convrec
