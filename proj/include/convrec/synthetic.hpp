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
#include <vector>

#include "convrec/interactions.hpp"
#include "convrec/kg_store.hpp"

namespace convrec {

// A dominant-relation world: every item has exactly one value per relation,
// and each user's positives all share one value of that user's dominant
// relation while their other attributes are uniformly random.
struct SyntheticSpec {
  std::size_t items = 200;
  std::size_t relations = 4;
  std::size_t values_per_relation = 5;
  std::size_t users = 100;
  std::size_t positives_per_user = 15;
  std::uint64_t seed = 7;
};

struct SyntheticDataset {
  KnowledgeGraph kg;
  InteractionLog log;
  std::vector<RelationId> dominant_relation;  // per user
  std::vector<EntityId> dominant_value;       // per user
};

SyntheticDataset make_synthetic(const SyntheticSpec& spec);

// Writes triples.tsv and interactions.tsv (positives rated 5) under `dir`.
void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace convrec
