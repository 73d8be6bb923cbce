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

#include <cmath>
#include <random>

#include "convrec/dqn.hpp"
#include "convrec/policy.hpp"
#include "scenarios.hpp"

namespace convrec {
namespace {

TEST(Act, FullExplorationIsUniform) {
  const auto net = PolicyNet::random(4, 3, 1);
  std::mt19937_64 rng(2);
  const Vector s = Vector::Ones(4);
  int asks = 0;
  for (int k = 0; k < 10000; ++k) asks += act(net, s, 1.0, rng) == Action::ask;
  EXPECT_NEAR(asks / 10000.0, 0.5, 0.02);
}

TEST(Act, GreedyPicksTheLargerQ) {
  auto net = PolicyNet::random(3, 2, 3);
  net.w1.setZero();
  net.b2 << 0.0, 1.0;
  std::mt19937_64 rng(4);
  EXPECT_EQ(act(net, Vector::Zero(3), 0.0, rng), Action::recommend);
  net.b2 << 1.0, 1.0;
  EXPECT_EQ(act(net, Vector::Zero(3), 0.0, rng), Action::ask);  // tie goes to ASK
}

TEST(Act, MaskedAskAlwaysRecommends) {
  const auto net = PolicyNet::random(3, 2, 5);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k)
    EXPECT_EQ(act(net, Vector::Ones(3), k % 2 ? 1.0 : 0.0, rng, false), Action::recommend);
}

TEST(Act, GreedyMatchesScalarForwardPass) {
  const auto net = PolicyNet::random(5, 4, 7);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector s = Vector::NullaryExpr(5, [&] { return g(rng); });
    double q[2];
    for (int a = 0; a < 2; ++a) {
      q[a] = net.b2[a];
      for (int h = 0; h < 4; ++h) {
        double pre = net.b1[h];
        for (int j = 0; j < 5; ++j) pre += net.w2(h, j) * s[j];
        q[a] += net.w1(a, h) * std::tanh(pre);
      }
    }
    const Eigen::Vector2d got = net.q_values(s);
    EXPECT_NEAR(got[0], q[0], 1e-12);
    EXPECT_NEAR(got[1], q[1], 1e-12);
    EXPECT_EQ(act(net, s, 0.0, rng), q[1] > q[0] ? Action::recommend : Action::ask);
  }
}

TEST(Act, WrongStateLengthThrows) {
  const auto net = PolicyNet::random(5, 4, 9);
  std::mt19937_64 rng(1);
  EXPECT_THROW(act(net, Vector::Zero(4), 0.0, rng), PolicyError);
}

TEST(Reward, DefaultValues) {
  const RewardConfig c;
  EXPECT_EQ(reward(TurnOutcome::informative_answer, c), 0.1);
  EXPECT_EQ(reward(TurnOutcome::uninformative_answer, c), -0.1);
  EXPECT_EQ(reward(TurnOutcome::accepted_recommendation, c), 1.0);
  EXPECT_EQ(reward(TurnOutcome::rejected_or_timeout, c), -0.3);
}

TEST(DiscountedReturn, SmallCases) {
  const std::vector<double> one = {1.0};
  EXPECT_EQ(discounted_return(one, 0.9), 1.0);
  const std::vector<double> two = {0.1, 1.0};
  EXPECT_NEAR(discounted_return(two, 0.9), 1.0, 1e-15);
}

TEST(DiscountedReturn, MatchesLoopOracle) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> r(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> rs(6);
    for (auto& x : rs) x = r(rng);
    double want = 0.0, w = 1.0;
    for (double x : rs) {
      want += w * x;
      w *= 0.9;
    }
    EXPECT_NEAR(discounted_return(rs, 0.9), want, 1e-14);
  }
}

TEST(ReplayBuffer, EvictsOldestAtCapacity) {
  ReplayBuffer buf(3);
  for (int k = 0; k < 5; ++k) {
    Transition t;
    t.state = Vector::Constant(1, k);
    t.terminal = true;
    buf.push(t);
  }
  EXPECT_EQ(buf.size(), 3u);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k)
    for (const auto& t : buf.sample(3, rng)) EXPECT_GE(t.state[0], 2.0);
}

TEST(ReplayBuffer, SamplingMoreThanHeldThrows) {
  ReplayBuffer buf(10);
  std::mt19937_64 rng(1);
  EXPECT_THROW(buf.sample(1, rng), PolicyError);
}

TEST(DqnStep, ExactTerminalTargetsGiveZeroLoss) {
  auto net = PolicyNet::random(3, 2, 11);
  net.w1.setZero();
  net.b2 << 1.0, 1.0;
  std::vector<Transition> batch;
  for (int k = 0; k < 4; ++k) {
    Transition t;
    t.state = Vector::Constant(3, k);
    t.action = k % 2 ? Action::ask : Action::recommend;
    t.reward = 1.0;
    t.terminal = true;
    batch.push_back(t);
  }
  EXPECT_EQ(td_loss(net, net, batch, 0.9, nullptr), 0.0);
}

TEST(DqnStep, TdTargetMasksAskWhenNotAllowed) {
  auto target = PolicyNet::random(2, 2, 12);
  target.w1.setZero();
  target.b2 << 5.0, 1.0;
  Transition t;
  t.state = Vector::Zero(2);
  t.reward = 0.5;
  t.next_state = Vector::Zero(2);
  t.next_ask_allowed = true;
  EXPECT_DOUBLE_EQ(td_target(target, t, 0.9), 0.5 + 0.9 * 5.0);
  t.next_ask_allowed = false;
  EXPECT_DOUBLE_EQ(td_target(target, t, 0.9), 0.5 + 0.9 * 1.0);
  t.terminal = true;
  EXPECT_DOUBLE_EQ(td_target(target, t, 0.9), 0.5);
}

TEST(DqnStep, TdGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const auto check = scenarios::check_td_gradient(seed);
    EXPECT_LE(check.max_rel_error, 1e-4) << check.worst;
    EXPECT_GT(check.checked, 0u);
  }
}

TEST(DqnStep, InsufficientBufferThrows) {
  DqnConfig cfg;
  cfg.batch_size = 4;
  DqnLearner learner(PolicyNet::random(2, 2, 1), cfg, 0.9, 2);
  ReplayBuffer buf(10);
  EXPECT_THROW(learner.step(buf), PolicyError);
}

TEST(DqnStep, ToyMdpGreedyPolicyOptimalWithinTwoThousandSteps) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = scenarios::toy_mdp(seed, 2000);
    EXPECT_TRUE(r.optimal_at_end) << "seed " << seed;
    EXPECT_GT(r.first_optimal_step, 0);
  }
}

TEST(SyncTarget, TargetEqualsOnlineAfterSync) {
  DqnConfig cfg;
  cfg.target_sync_every = 1000;
  DqnLearner learner(PolicyNet::random(3, 4, 1), cfg, 0.9, 2);
  std::mt19937_64 rng(3);
  const auto batch = scenarios::random_transitions(8, 3, rng);
  for (int k = 0; k < 3; ++k) learner.step_on(batch);
  EXPECT_FALSE(learner.online() == learner.target());
  learner.sync_target();
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    const Vector s = Vector::NullaryExpr(3, [&] { return g(rng); });
    EXPECT_EQ(learner.online().q_values(s), learner.target().q_values(s));
  }
}

// Independent rmsprop replay of ten steps with a sync every four.
TEST(SyncTarget, ScriptedParameterTrace) {
  DqnConfig cfg;
  cfg.target_sync_every = 4;
  const PolicyNet init = PolicyNet::random(3, 4, 5);
  DqnLearner learner(init, cfg, 0.9, 6);
  std::mt19937_64 rng(7);
  const auto batch = scenarios::random_transitions(8, 3, rng);

  PolicyNet online = init, target = init, sq = PolicyNet::zeros_like(init);
  auto rms = [&](auto& p, auto& s, const auto& g) {
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      s.data()[k] = 0.9 * s.data()[k] + 0.1 * g.data()[k] * g.data()[k];
      p.data()[k] -= 1e-3 * g.data()[k] / (std::sqrt(s.data()[k]) + 1e-8);
    }
  };
  for (int step = 1; step <= 10; ++step) {
    const PolicyNet target_before = learner.target();
    learner.step_on(batch);
    PolicyNet g = PolicyNet::zeros_like(online);
    td_loss(online, target, batch, 0.9, &g);
    rms(online.w1, sq.w1, g.w1);
    rms(online.b1, sq.b1, g.b1);
    rms(online.w2, sq.w2, g.w2);
    rms(online.b2, sq.b2, g.b2);
    if (step % 4 == 0) target = online;
    EXPECT_LT((learner.online().w2 - online.w2).cwiseAbs().maxCoeff(), 1e-14) << "step " << step;
    EXPECT_LT((learner.online().w1 - online.w1).cwiseAbs().maxCoeff(), 1e-14) << "step " << step;
    EXPECT_LT((learner.target().w2 - target.w2).cwiseAbs().maxCoeff(), 1e-14) << "step " << step;
    if (step % 4 != 0) EXPECT_TRUE(learner.target() == target_before) << "step " << step;
  }
}

TEST(Epsilon, AnnealsLinearlyThenHolds) {
  const DqnConfig cfg;
  EXPECT_DOUBLE_EQ(epsilon_at(0, 1000, cfg), 1.0);
  EXPECT_NEAR(epsilon_at(250, 1000, cfg), 0.55, 1e-12);
  EXPECT_DOUBLE_EQ(epsilon_at(500, 1000, cfg), 0.1);
  EXPECT_DOUBLE_EQ(epsilon_at(999, 1000, cfg), 0.1);
}

}  // namespace
}  // namespace convrec
