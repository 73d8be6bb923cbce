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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "convrec/dialogue_state.hpp"
#include "scenarios.hpp"
#include "test_support.hpp"

namespace convrec {
namespace {

TEST(UpdateBelief, EmptyListLeavesBeliefUnchanged) {
  const auto fx = testing_support::small_fixture(1);
  auto s = BeliefState::empty(6);
  update_belief(s, std::vector<EntityId>{EntityId(12)}, fx.model);
  const Vector before = s.b;
  update_belief(s, {}, fx.model);
  EXPECT_EQ(s.b, before);
  EXPECT_EQ(s.affirmed.size(), 1u);
}

TEST(UpdateBelief, IsAdditiveAcrossCalls) {
  const auto fx = testing_support::small_fixture(2);
  const auto& e = fx.model.params().entity;
  auto s = BeliefState::empty(6);
  update_belief(s, std::vector<EntityId>{EntityId(10), EntityId(11)}, fx.model);
  update_belief(s, std::vector<EntityId>{EntityId(12)}, fx.model);
  const Vector want = (e.row(10) + e.row(11) + e.row(12)).transpose();
  EXPECT_LT((s.b - want).norm(), 1e-15);
}

TEST(UpdateBelief, ArrivalOrderDoesNotMatter) {
  const auto fx = testing_support::small_fixture(3);
  std::vector<EntityId> ents = {EntityId(3), EntityId(17), EntityId(9), EntityId(14), EntityId(0)};
  Vector want = Vector::Zero(6);
  for (auto x : ents) want += fx.model.params().entity.row(x.value).transpose();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(ents.begin(), ents.end(), rng);
    auto s = BeliefState::empty(6);
    for (auto x : ents) update_belief(s, std::vector<EntityId>{x}, fx.model);
    EXPECT_LT((s.b - want).norm(), 1e-12);
  }
}

TEST(UpdateBelief, UnknownEntityThrowsAndLeavesStateAlone) {
  const auto fx = testing_support::small_fixture(5);
  auto s = BeliefState::empty(6);
  EXPECT_THROW(update_belief(s, std::vector<EntityId>{EntityId(3), EntityId(99)}, fx.model),
               ModelError);
  EXPECT_TRUE(s.affirmed.empty());
  EXPECT_EQ(s.b, Vector::Zero(6));
}

TEST(ComposeState, LengthIsDimPlusRelationsPlusOne) {
  const auto s = compose_state(BeliefState::empty(4), ClarifiedMask::empty(3), 0.5, 1, 4, 3);
  EXPECT_EQ(s.s.size(), 8);
}

TEST(ComposeState, ZeroBeliefZeroMaskUnitSignal) {
  const auto s = compose_state(BeliefState::empty(4), ClarifiedMask::empty(3), 1.0, 1, 4, 3);
  Vector want = Vector::Zero(8);
  want[7] = 1.0;
  EXPECT_EQ(s.s, want);
}

TEST(ComposeState, SlicesEqualTheirInputs) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    auto b = BeliefState::empty(5);
    b.b = Vector::NullaryExpr(5, [&] { return g(rng); });
    auto m = ClarifiedMask::empty(4);
    for (int r = 0; r < 4; ++r)
      if (coin(rng)) m.set(RelationId(r));
    const double c = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto s = compose_state(b, m, c, 2, 5, 4);
    EXPECT_EQ(s.s.head(5), b.b);
    for (int r = 0; r < 4; ++r) EXPECT_EQ(s.s[5 + r], m.test(RelationId(r)) ? 1.0 : 0.0);
    EXPECT_EQ(s.s[9], c);
  }
}

TEST(ComposeState, DimensionMismatchThrows) {
  EXPECT_THROW(compose_state(BeliefState::empty(3), ClarifiedMask::empty(3), 0, 1, 4, 3), ModelError);
  EXPECT_THROW(compose_state(BeliefState::empty(4), ClarifiedMask::empty(2), 0, 1, 4, 3), ModelError);
}

TEST(CandidateSignal, InfiniteThresholdCountsEverything) {
  const auto fx = testing_support::small_fixture(7);
  const auto view = fx.model.user_view(UserId(0));
  std::vector<ItemId> c = {ItemId(0), ItemId(4), ItemId(9)};
  EXPECT_EQ(candidate_signal(fx.model, view, Vector::Zero(6), c,
                             std::numeric_limits<double>::infinity()),
            1.0);
}

TEST(CandidateSignal, ZeroThresholdCountsNothing) {
  const auto fx = testing_support::small_fixture(8);
  const auto view = fx.model.user_view(UserId(1));
  std::vector<ItemId> c = {ItemId(1), ItemId(2), ItemId(3)};
  EXPECT_EQ(candidate_signal(fx.model, view, Vector::Zero(6), c, 0.0), 0.0);
}

TEST(CandidateSignal, EmptyCandidatesGiveZero) {
  const auto fx = testing_support::small_fixture(9);
  EXPECT_EQ(candidate_signal(fx.model, fx.model.user_view(UserId(0)), Vector::Zero(6), {}, 10.0), 0.0);
}

TEST(CandidateSignal, MatchesCountingOracle) {
  const auto fx = testing_support::small_fixture(10);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> item(0, 9), user(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ItemId> c;
    for (int k = 0; k < 20; ++k) c.emplace_back(item(rng));
    const Vector b = Vector::NullaryExpr(6, [&] { return 0.3 * g(rng); });
    const UserId u(user(rng));
    std::vector<double> scores;
    for (auto i : c) scores.push_back(fx.model.score_user_item(u, i, b));
    std::sort(scores.begin(), scores.end());
    const double m = scores[static_cast<std::size_t>(trial % 20)];
    EXPECT_EQ(candidate_signal(fx.model, fx.model.user_view(u), b, c, m),
              scenarios::oracle_signal(fx.model, u, b, c, m));
  }
}

TEST(StateSummary, ReportsEveryComponent) {
  auto b = BeliefState::empty(2);
  b.affirmed = {EntityId(4)};
  auto m = ClarifiedMask::empty(2);
  m.set(RelationId(1));
  const auto j = state_summary(b, m, 0.25, 3);
  EXPECT_EQ(j.at("affirmed_entities"), nlohmann::json::array({4}));
  EXPECT_EQ(j.at("clarified"), nlohmann::json::array({0, 1}));
  EXPECT_EQ(j.at("candidate_ratio"), 0.25);
  EXPECT_EQ(j.at("turn"), 3);
}

}  // namespace
}  // namespace convrec
