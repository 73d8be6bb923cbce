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

#include "convrec/kg_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace convrec {

std::int32_t Vocabulary::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t KnowledgeGraph::key(const Triple& t) const {
  const auto n_e = static_cast<std::uint64_t>(entities_.size());
  const auto n_r = static_cast<std::uint64_t>(relations_.size());
  return (static_cast<std::uint64_t>(t.head.value) * n_r +
          static_cast<std::uint64_t>(t.relation.value)) *
             n_e +
         static_cast<std::uint64_t>(t.tail.value);
}

bool KnowledgeGraph::contains(const Triple& t) const {
  if (!t.head.valid() || !t.tail.valid() || !t.relation.valid()) return false;
  if (t.head.index() >= num_entities() || t.tail.index() >= num_entities() ||
      t.relation.index() >= num_relations())
    return false;
  return triple_keys_.count(key(t)) > 0;
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view name) const {
  if (auto id = entities_.find(name)) return EntityId(*id);
  return std::nullopt;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view name) const {
  if (auto id = relations_.find(name)) return RelationId(*id);
  return std::nullopt;
}

std::optional<ItemId> KnowledgeGraph::find_item(std::string_view name) const {
  if (auto e = find_entity(name)) return item_of(*e);
  return std::nullopt;
}

std::optional<ItemId> KnowledgeGraph::item_of(EntityId e) const {
  auto it = entity_item_.find(e.value);
  if (it == entity_item_.end()) return std::nullopt;
  return it->second;
}

const AttributeRow& KnowledgeGraph::item_attributes(ItemId item) const {
  if (!item.valid() || item.index() >= attributes_.size())
    throw DataError("unknown item id " + std::to_string(item.value));
  return attributes_[item.index()];
}

bool KnowledgeGraph::Builder::add(std::string_view head, std::string_view relation,
                                  std::string_view tail) {
  if (blocklist_.count(std::string(relation))) {
    ++blocked_;
    return false;
  }
  const auto h = graph_.entities_.intern(head);
  const auto r = graph_.relations_.intern(relation);
  const auto t = graph_.entities_.intern(tail);
  if (!seen_.emplace(h, r, t).second) {
    ++duplicates_;
    return false;
  }
  graph_.triples_.push_back({EntityId(h), RelationId(r), EntityId(t)});
  return true;
}

void KnowledgeGraph::Builder::declare_item(std::string_view name) {
  auto id = graph_.entities_.find(name);
  if (!id) throw DataError("declared item '" + std::string(name) + "' appears in no triple");
  declared_items_.push_back(*id);
}

KnowledgeGraph KnowledgeGraph::Builder::build() && {
  KnowledgeGraph g = std::move(graph_);
  if (g.relations_.size() == 0) throw DataError("knowledge graph has no relations");
  if (g.triples_.empty()) throw DataError("knowledge graph has no triples");

  for (const auto& t : g.triples_) g.triple_keys_.insert(g.key(t));

  std::vector<std::int32_t> items = declared_items_;
  if (items.empty()) {
    for (const auto& t : g.triples_) items.push_back(t.head.value);
  }
  for (auto e : items) {
    if (g.entity_item_.count(e)) continue;
    const ItemId id(g.item_entity_.size());
    g.item_entity_.emplace_back(e);
    g.entity_item_.emplace(e, id);
  }

  g.attributes_.assign(g.item_entity_.size(), {});
  g.relation_values_.assign(g.relations_.size(), {});
  for (const auto& t : g.triples_) {
    g.relation_values_[t.relation.index()].push_back(t.tail);
    if (auto item = g.item_of(t.head)) {
      g.attributes_[item->index()][t.relation].push_back(t.tail);
    }
  }
  for (auto& row : g.attributes_) {
    for (auto& [rel, values] : row) std::sort(values.begin(), values.end());
  }
  for (auto& values : g.relation_values_) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
  }
  return g;
}

KnowledgeGraph load_triples(const std::filesystem::path& path,
                            const std::set<std::string>& relation_blocklist,
                            TripleLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open triple file " + path.string());
  KnowledgeGraph::Builder builder(relation_blocklist);
  std::string line;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected head<TAB>relation<TAB>tail");
    }
    builder.add(fields[0], fields[1], fields[2]);
    ++records;
  }
  if (records == 0) throw DataError("triple file " + path.string() + " is empty");
  if (report) {
    report->lines = records;
    report->duplicates = builder.duplicates();
    report->blocked = builder.blocked();
  }
  return std::move(builder).build();
}

std::set<std::string> load_relation_blocklist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open blocklist " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    auto name = detail::trim(line);
    if (name.empty() || name.front() == '#') continue;
    out.emplace(name);
  }
  return out;
}

Triple sample_negative_triple(const KnowledgeGraph& kg, const Triple& positive,
                              std::mt19937_64& rng, int max_attempts) {
  if (kg.num_entities() == 0) throw DataError("cannot corrupt triples of an empty graph");
  std::uniform_int_distribution<std::int32_t> pick(
      0, static_cast<std::int32_t>(kg.num_entities()) - 1);
  std::bernoulli_distribution replace_head(0.5);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Triple candidate = positive;
    if (replace_head(rng)) {
      candidate.head = EntityId(pick(rng));
    } else {
      candidate.tail = EntityId(pick(rng));
    }
    if (!kg.contains(candidate)) return candidate;
  }
  throw DataError("no unobserved corruption found after " + std::to_string(max_attempts) +
                  " attempts");
}

}  // namespace convrec
