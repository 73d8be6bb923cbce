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

#include "convrec/dialogue_state.hpp"

#include <string>

namespace convrec {

BeliefState BeliefState::empty(std::size_t dim) {
  return {Vector::Zero(static_cast<Eigen::Index>(dim)), {}};
}

void update_belief(BeliefState& state, std::span<const EntityId> entities,
                   const EmbeddingModel& model) {
  if (state.b.size() != static_cast<Eigen::Index>(model.dim()))
    throw ModelError("belief dimension does not match model");
  const Vector add = model.entity_sum(entities);
  state.b += add;
  state.affirmed.insert(state.affirmed.end(), entities.begin(), entities.end());
}

ClarifiedMask ClarifiedMask::empty(std::size_t relations) {
  return {std::vector<std::uint8_t>(relations, 0)};
}

void ClarifiedMask::set(RelationId r) {
  if (!r.valid() || r.index() >= bits.size())
    throw ModelError("relation id " + std::to_string(r.value) + " outside mask");
  bits[r.index()] = 1;
}

bool ClarifiedMask::test(RelationId r) const {
  return r.valid() && r.index() < bits.size() && bits[r.index()] != 0;
}

Vector ClarifiedMask::as_vector() const {
  Vector v(static_cast<Eigen::Index>(bits.size()));
  for (std::size_t k = 0; k < bits.size(); ++k) v[static_cast<Eigen::Index>(k)] = bits[k];
  return v;
}

double candidate_signal(const EmbeddingModel& model, const UserView& view, const Vector& belief,
                        std::span<const ItemId> candidates, double threshold) {
  if (candidates.empty()) return 0.0;
  std::size_t below = 0;
  for (auto item : candidates)
    if (model.score_user_item(view, item, belief) < threshold) ++below;
  return static_cast<double>(below) / static_cast<double>(candidates.size());
}

DialogueState compose_state(const BeliefState& belief, const ClarifiedMask& mask, double signal,
                            int turn, std::size_t dim, std::size_t relations) {
  if (belief.b.size() != static_cast<Eigen::Index>(dim))
    throw ModelError("belief has dimension " + std::to_string(belief.b.size()) + ", expected " +
                     std::to_string(dim));
  if (mask.bits.size() != relations)
    throw ModelError("mask has " + std::to_string(mask.bits.size()) + " bits, expected " +
                     std::to_string(relations));
  const auto d = static_cast<Eigen::Index>(dim);
  const auto r = static_cast<Eigen::Index>(relations);
  DialogueState out;
  out.s.resize(d + r + 1);
  out.s.head(d) = belief.b;
  out.s.segment(d, r) = mask.as_vector();
  out.s[d + r] = signal;
  out.turn = turn;
  return out;
}

nlohmann::json state_summary(const BeliefState& belief, const ClarifiedMask& mask, double signal,
                             int turn) {
  nlohmann::json affirmed = nlohmann::json::array();
  for (auto e : belief.affirmed) affirmed.push_back(e.value);
  nlohmann::json bits = nlohmann::json::array();
  for (auto b : mask.bits) bits.push_back(static_cast<int>(b));
  return {{"affirmed_entities", affirmed}, {"clarified", bits}, {"candidate_ratio", signal},
          {"turn", turn}};
}

}  // namespace convrec
