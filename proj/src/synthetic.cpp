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

#include "convrec/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

namespace convrec {

namespace {

std::string relation_label(std::size_t r) {
  static const char* kNames[] = {"genre",   "director", "starring", "language",
                                 "country", "writer",   "composer", "producer"};
  if (r < std::size(kNames)) return kNames[r];
  return "attribute_" + std::to_string(r);
}

std::string padded(const char* prefix, std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%03zu", prefix, k);
  return buf;
}

}  // namespace

SyntheticDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.items == 0 || spec.relations == 0 || spec.values_per_relation == 0 || spec.users == 0)
    throw DataError("synthetic spec needs items, relations, values and users > 0");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick_value(0, spec.values_per_relation - 1);
  std::uniform_int_distribution<std::size_t> pick_relation(0, spec.relations - 1);

  // value_of[i][r] in [0, values_per_relation)
  std::vector<std::vector<std::size_t>> value_of(spec.items,
                                                 std::vector<std::size_t>(spec.relations));
  for (auto& row : value_of)
    for (auto& v : row) v = pick_value(rng);

  KnowledgeGraph::Builder builder;
  for (std::size_t i = 0; i < spec.items; ++i) {
    for (std::size_t r = 0; r < spec.relations; ++r) {
      const auto rel = relation_label(r);
      builder.add(padded("movie_", i), rel, rel + "_" + std::to_string(value_of[i][r]));
    }
  }
  SyntheticDataset out{std::move(builder).build(), {}, {}, {}};

  std::vector<std::string> users;
  std::vector<std::vector<ItemId>> positives;
  for (std::size_t u = 0; u < spec.users; ++u) {
    std::vector<ItemId> pool;
    std::size_t rel = 0, val = 0;
    // Redraw until the chosen value has enough items to supply the positives.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      rel = pick_relation(rng);
      val = pick_value(rng);
      pool.clear();
      for (std::size_t i = 0; i < spec.items; ++i)
        if (value_of[i][rel] == val) pool.push_back(*out.kg.find_item(padded("movie_", i)));
      if (pool.size() >= spec.positives_per_user) break;
    }
    if (pool.size() < spec.positives_per_user)
      throw DataError("synthetic spec cannot supply enough positives per user");
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(spec.positives_per_user);
    std::sort(pool.begin(), pool.end());
    users.push_back(padded("user_", u));
    positives.push_back(pool);
    const auto rel_name = relation_label(rel);
    out.dominant_relation.push_back(*out.kg.find_relation(rel_name));
    out.dominant_value.push_back(*out.kg.find_entity(rel_name + "_" + std::to_string(val)));
  }

  InteractionOptions options;
  options.min_interactions = 0;
  options.seed = spec.seed + 1;
  out.log = build_interaction_log(users, positives, positives, out.kg.num_items(), options);
  return out;
}

void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream triples(dir / "triples.tsv");
  for (const auto& t : data.kg.triples())
    triples << data.kg.entity_name(t.head) << '\t' << data.kg.relation_name(t.relation) << '\t'
            << data.kg.entity_name(t.tail) << '\n';
  std::ofstream inter(dir / "interactions.tsv");
  for (std::size_t u = 0; u < data.log.num_users(); ++u) {
    for (auto item : data.log.positives(UserId(u)))
      inter << data.log.user_name(UserId(u)) << '\t' << data.kg.item_name(item) << "\t5\n";
  }
  if (!triples || !inter) throw DataError("failed writing synthetic dataset to " + dir.string());
}

}  // namespace convrec
