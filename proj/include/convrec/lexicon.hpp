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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convrec/kg_store.hpp"

namespace convrec {

// Lowercases ASCII, turns punctuation and underscores into spaces, collapses
// runs of whitespace and trims. Idempotent.
std::string normalize_surface(std::string_view text);

// Exact-match entity linker over normalized surface strings.
class Lexicon {
 public:
  // Every entity name of the graph becomes a surface form.
  static Lexicon from_graph(const KnowledgeGraph& kg);

  // Lines are `surface<TAB>entity-name`. Unknown entity names are an error.
  void load_aliases(const std::filesystem::path& path, const KnowledgeGraph& kg);
  void add(std::string_view surface, EntityId entity);

  // Entities whose surface form appears in `text` as a whole-word phrase.
  // When `allowed` is non-empty only those entities are returned. Sorted by
  // id, no duplicates.
  std::vector<EntityId> link(std::string_view text, std::span<const EntityId> allowed = {}) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<EntityId>, std::less<>> entries_;
  std::size_t max_words_ = 0;
};

}  // namespace convrec
