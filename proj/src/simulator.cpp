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

#include "convrec/simulator.hpp"

#include <algorithm>

namespace convrec {

std::optional<SimulatedUser> start_session(UserId user, ItemId target, const KnowledgeGraph& kg,
                                           std::size_t answer_cap) {
  auto preference = kg.item_attributes(target);
  if (preference.empty()) return std::nullopt;
  return SimulatedUser{user, target, std::move(preference), answer_cap};
}

std::vector<EntityId> answer_question(const SimulatedUser& sim, RelationId relation) {
  const auto it = sim.preference.find(relation);
  if (it == sim.preference.end()) return {};
  std::vector<EntityId> out = it->second;
  if (sim.answer_cap > 0 && out.size() > sim.answer_cap) out.resize(sim.answer_cap);
  return out;
}

bool judge_recommendation(const SimulatedUser& sim, std::span<const ItemId> items) {
  return std::find(items.begin(), items.end(), sim.target) != items.end();
}

bool judge_recommendation(const SimulatedUser& sim, std::span<const ScoredItem> items) {
  return std::any_of(items.begin(), items.end(),
                     [&](const ScoredItem& s) { return s.item == sim.target; });
}

}  // namespace convrec
