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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "convrec/ids.hpp"

namespace convrec {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Attribute values of one item, keyed by relation. Values are kept sorted.
using AttributeRow = std::map<RelationId, std::vector<EntityId>>;

// Interns strings to dense ids in first-seen order.
class Vocabulary {
 public:
  std::int32_t intern(std::string_view name);
  std::optional<std::int32_t> find(std::string_view name) const;
  const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

// Immutable once built; safe for concurrent reads.
class KnowledgeGraph {
 public:
  class Builder;

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_items() const { return item_entity_.size(); }
  std::size_t num_triples() const { return triples_.size(); }

  const std::vector<Triple>& triples() const { return triples_; }
  bool contains(const Triple& t) const;

  const std::string& entity_name(EntityId e) const { return entities_.name(e.value); }
  const std::string& relation_name(RelationId r) const { return relations_.name(r.value); }
  const std::string& item_name(ItemId i) const { return entity_name(item_entity(i)); }
  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;
  std::optional<ItemId> find_item(std::string_view name) const;
  std::optional<ItemId> item_of(EntityId e) const;

  EntityId item_entity(ItemId i) const { return item_entity_.at(i.index()); }
  const std::vector<EntityId>& item_entities() const { return item_entity_; }

  // Throws DataError for an unknown item.
  const AttributeRow& item_attributes(ItemId item) const;

  // Every tail seen under `relation`, sorted ascending.
  const std::vector<EntityId>& relation_values(RelationId relation) const {
    return relation_values_.at(relation.index());
  }

  const Vocabulary& entity_vocabulary() const { return entities_; }
  const Vocabulary& relation_vocabulary() const { return relations_; }

 private:
  std::uint64_t key(const Triple& t) const;

  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> triples_;
  std::unordered_set<std::uint64_t> triple_keys_;
  std::vector<EntityId> item_entity_;
  std::unordered_map<std::int32_t, ItemId> entity_item_;
  std::vector<AttributeRow> attributes_;
  std::vector<std::vector<EntityId>> relation_values_;
};

// Accumulates triples, then freezes them into a KnowledgeGraph. Items are
// the distinct triple heads in first-seen order unless an explicit item list
// is supplied.
class KnowledgeGraph::Builder {
 public:
  explicit Builder(std::set<std::string> relation_blocklist = {})
      : blocklist_(std::move(relation_blocklist)) {}

  // Returns false when the triple was a duplicate or used a blocklisted
  // relation.
  bool add(std::string_view head, std::string_view relation, std::string_view tail);
  void declare_item(std::string_view name);

  std::size_t duplicates() const { return duplicates_; }
  std::size_t blocked() const { return blocked_; }

  KnowledgeGraph build() &&;

 private:
  std::set<std::string> blocklist_;
  KnowledgeGraph graph_;
  std::vector<std::int32_t> declared_items_;
  std::set<std::tuple<std::int32_t, std::int32_t, std::int32_t>> seen_;
  std::size_t duplicates_ = 0;
  std::size_t blocked_ = 0;
};

struct TripleLoadReport {
  std::size_t lines = 0;
  std::size_t duplicates = 0;
  std::size_t blocked = 0;
};

// Reads `head<TAB>relation<TAB>tail` lines. Throws DataError on a malformed
// line (with its number), an empty file, or when no relation survives.
KnowledgeGraph load_triples(const std::filesystem::path& path,
                            const std::set<std::string>& relation_blocklist = {},
                            TripleLoadReport* report = nullptr);

// One relation name per line; blank lines and '#' comments are skipped.
std::set<std::string> load_relation_blocklist(const std::filesystem::path& path);

// Replaces head or tail (equal probability) with a uniformly drawn entity
// until the result is not an observed triple. Throws DataError after
// `max_attempts` failures.
Triple sample_negative_triple(const KnowledgeGraph& kg, const Triple& positive,
                              std::mt19937_64& rng, int max_attempts = 1000);

}  // namespace convrec
