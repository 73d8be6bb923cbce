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

#include <optional>
#include <span>
#include <vector>

#include "convrec/embedding.hpp"
#include "convrec/kg_store.hpp"

namespace convrec {

// A rule-based user who wants one hidden target item and answers questions
// with that item's attribute values.
struct SimulatedUser {
  UserId user;
  ItemId target;
  AttributeRow preference;
  std::size_t answer_cap = 0;  // 0 returns every value
};

// nullopt when the target has no attributes to talk about.
std::optional<SimulatedUser> start_session(UserId user, ItemId target, const KnowledgeGraph& kg,
                                           std::size_t answer_cap = 0);

// Values of `relation` for the target, ascending by id; empty when the target
// has none.
std::vector<EntityId> answer_question(const SimulatedUser& sim, RelationId relation);

bool judge_recommendation(const SimulatedUser& sim, std::span<const ItemId> items);
bool judge_recommendation(const SimulatedUser& sim, std::span<const ScoredItem> items);

}  // namespace convrec
