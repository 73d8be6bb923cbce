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

#include <span>
#include <vector>

#include "convrec/embedding.hpp"
#include "json.hpp"

namespace convrec {

// Running sum of the embeddings of every attribute value the user affirmed.
struct BeliefState {
  Vector b;
  std::vector<EntityId> affirmed;

  static BeliefState empty(std::size_t dim);
};

// Appends `entities` and adds their embeddings to b. Throws ModelError on an
// unknown entity, leaving the state untouched.
void update_belief(BeliefState& state, std::span<const EntityId> entities,
                   const EmbeddingModel& model);

// One bit per relation, set once the user gave at least one value for it.
struct ClarifiedMask {
  std::vector<std::uint8_t> bits;

  static ClarifiedMask empty(std::size_t relations);
  void set(RelationId r);
  bool test(RelationId r) const;
  Vector as_vector() const;
};

// Fraction of `candidates` whose score is strictly below `threshold`; 0 when
// there are no candidates.
double candidate_signal(const EmbeddingModel& model, const UserView& view, const Vector& belief,
                        std::span<const ItemId> candidates, double threshold);

// s = b (+) q (+) [c], length d + |R| + 1.
struct DialogueState {
  Vector s;
  int turn = 0;
};

DialogueState compose_state(const BeliefState& belief, const ClarifiedMask& mask, double signal,
                            int turn, std::size_t dim, std::size_t relations);

nlohmann::json state_summary(const BeliefState& belief, const ClarifiedMask& mask, double signal,
                             int turn);

}  // namespace convrec
