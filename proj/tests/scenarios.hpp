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

// Scenarios shared by the unit tests and the acceptance runner. Every oracle
// here is written without calling the routine it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "convrec/dqn.hpp"
#include "convrec/embedding.hpp"
#include "convrec/eval.hpp"

namespace convrec::scenarios {

// ---- DQN TD loss ---------------------------------------------------------

struct NetGradientCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

inline std::vector<Transition> random_transitions(std::size_t n, std::size_t state_dim,
                                                  std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> r(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<Transition> out;
  for (std::size_t k = 0; k < n; ++k) {
    Transition t;
    t.state = Vector::NullaryExpr(static_cast<Eigen::Index>(state_dim), [&] { return g(rng); });
    t.action = coin(rng) ? Action::ask : Action::recommend;
    t.reward = r(rng);
    t.terminal = k % 3 == 2;
    if (!t.terminal) {
      t.next_state = Vector::NullaryExpr(static_cast<Eigen::Index>(state_dim), [&] { return g(rng); });
      t.next_ask_allowed = coin(rng);
    }
    out.push_back(std::move(t));
  }
  return out;
}

// Central differences of td_loss over every online parameter.
inline NetGradientCheck check_td_gradient(std::uint64_t seed, double h = 1e-6) {
  const std::size_t state_dim = 7, hidden = 5;
  PolicyNet net = PolicyNet::random(state_dim, hidden, seed);
  const PolicyNet target = PolicyNet::random(state_dim, hidden, seed + 1);
  std::mt19937_64 rng(seed + 2);
  const auto batch = random_transitions(9, state_dim, rng);
  const double eta = 0.9;

  PolicyNet grad = PolicyNet::zeros_like(net);
  td_loss(net, target, batch, eta, &grad);

  NetGradientCheck out;
  auto visit = [&](const char* name, double* data, const double* g, Eigen::Index n) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double saved = data[k];
      data[k] = saved + h;
      const double up = td_loss(net, target, batch, eta, nullptr);
      data[k] = saved - h;
      const double down = td_loss(net, target, batch, eta, nullptr);
      data[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double rel =
          std::abs(g[k] - numeric) / std::max({std::abs(g[k]), std::abs(numeric), 1e-4});
      ++out.checked;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        std::ostringstream os;
        os << name << "[" << k << "] analytic=" << g[k] << " numeric=" << numeric;
        out.worst = os.str();
      }
    }
  };
  visit("w1", net.w1.data(), grad.w1.data(), net.w1.size());
  visit("b1", net.b1.data(), grad.b1.data(), net.b1.size());
  visit("w2", net.w2.data(), grad.w2.data(), net.w2.size());
  visit("b2", net.b2.data(), grad.b2.data(), net.b2.size());
  return out;
}

// ---- Two-state toy MDP ---------------------------------------------------
//
// s0: ASK moves to s1 with reward 0, RECOMMEND ends with -0.3.
// s1: ASK ends with -0.3, RECOMMEND ends with +1.
// The optimal greedy policy asks in s0 and recommends in s1.

struct ToyMdpResult {
  bool optimal_at_end = false;
  long first_optimal_step = -1;  // -1 when never optimal
  long steps = 0;
};

inline ToyMdpResult toy_mdp(std::uint64_t seed, long max_steps) {
  const Vector s0 = (Vector(2) << 1.0, 0.0).finished();
  const Vector s1 = (Vector(2) << 0.0, 1.0).finished();
  DqnConfig cfg;
  cfg.batch_size = 32;
  cfg.hidden = 16;
  cfg.target_sync_every = 50;
  DqnLearner learner(PolicyNet::random(2, cfg.hidden, seed), cfg, 0.9, seed + 1);
  ReplayBuffer buffer(10000);
  std::mt19937_64 rng(seed + 2);
  std::bernoulli_distribution coin(0.5);

  auto optimal = [&] {
    const auto& net = learner.online();
    return greedy_action(net.q_values(s0)) == Action::ask &&
           greedy_action(net.q_values(s1)) == Action::recommend;
  };

  ToyMdpResult out;
  bool at_s0 = true;
  while (learner.steps() < max_steps) {
    Transition t;
    t.state = at_s0 ? s0 : s1;
    t.action = coin(rng) ? Action::ask : Action::recommend;
    if (at_s0 && t.action == Action::ask) {
      t.reward = 0.0;
      t.next_state = s1;
      at_s0 = false;
    } else {
      t.reward = (!at_s0 && t.action == Action::recommend) ? 1.0 : -0.3;
      t.terminal = true;
      at_s0 = true;
    }
    buffer.push(std::move(t));
    if (buffer.size() < cfg.batch_size) continue;
    learner.step(buffer);
    if (out.first_optimal_step < 0 && optimal()) out.first_optimal_step = learner.steps();
  }
  out.steps = learner.steps();
  out.optimal_at_end = optimal();
  return out;
}

// ---- Episode logs and metric oracles ------------------------------------

inline std::vector<Episode> random_episodes(std::size_t n, int t_max, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> turn(1, t_max), kind(0, 9);
  std::vector<Episode> out;
  for (std::size_t k = 0; k < n; ++k) {
    Episode e;
    e.session_id = "e" + std::to_string(k);
    e.t_max = t_max;
    const int c = kind(rng);
    e.outcome = c < 5 ? EpisodeOutcome::success
                      : (c < 9 ? EpisodeOutcome::failure : EpisodeOutcome::aborted);
    e.turns_used = e.outcome == EpisodeOutcome::failure ? t_max : turn(rng);
    out.push_back(std::move(e));
  }
  return out;
}

// SR curve from a histogram of success turns and a running sum.
inline std::vector<double> oracle_sr_curve(const std::vector<Episode>& eps, int t_max) {
  std::vector<long> hist(static_cast<std::size_t>(t_max) + 1, 0);
  long n = 0;
  for (const auto& e : eps) {
    if (e.outcome == EpisodeOutcome::aborted) continue;
    ++n;
    if (e.outcome == EpisodeOutcome::success) ++hist[static_cast<std::size_t>(e.turns_used)];
  }
  std::vector<double> curve;
  long running = 0;
  for (int t = 1; t <= t_max; ++t) {
    running += hist[static_cast<std::size_t>(t)];
    curve.push_back(static_cast<double>(running) / static_cast<double>(n));
  }
  return curve;
}

inline double oracle_average_turn(const std::vector<Episode>& eps) {
  std::vector<int> turns;
  for (const auto& e : eps) {
    if (e.outcome == EpisodeOutcome::success) turns.push_back(e.turns_used);
    if (e.outcome == EpisodeOutcome::failure) turns.push_back(e.t_max);
  }
  long total = 0;
  for (int t : turns) total += t;
  return static_cast<double>(total) / static_cast<double>(turns.size());
}

// ---- Scoring oracles -----------------------------------------------------

// f(u, i | b) recomputed from raw parameters: softmax attention, unit
// projection, explicit L1.
inline double oracle_score(const EmbeddingModel& model, UserId user, ItemId item,
                           const Vector& belief) {
  const auto& p = model.params();
  const auto R = static_cast<Eigen::Index>(model.shape().relations);
  const Vector u = p.user.row(user.value).transpose();
  auto weights = [&](const AttentionNet& net, const Matrix& table) {
    Vector w(R);
    if (model.attention_mode() == AttentionMode::average) {
      w.setConstant(1.0 / static_cast<double>(R));
      return w;
    }
    Vector logits(R);
    for (Eigen::Index r = 0; r < R; ++r) {
      Vector x(2 * u.size());
      x << u, table.row(r).transpose();
      const Vector hidden = (net.weight * x + net.bias).cwiseMax(0.0);
      logits[r] = net.head.dot(hidden);
    }
    const double top = logits.maxCoeff();
    double z = 0.0;
    for (Eigen::Index r = 0; r < R; ++r) z += std::exp(logits[r] - top);
    for (Eigen::Index r = 0; r < R; ++r) w[r] = std::exp(logits[r] - top) / z;
    return w;
  };
  const Vector alpha = weights(p.translation_attention, p.relation);
  const Vector beta = weights(p.projection_attention, p.normal);
  Vector t = Vector::Zero(u.size()), w = Vector::Zero(u.size());
  for (Eigen::Index r = 0; r < R; ++r) {
    t += alpha[r] * p.relation.row(r).transpose();
    w += beta[r] * p.normal.row(r).transpose();
  }
  w /= w.norm();
  const EntityId e = model.item_entities().at(item.index());
  const Vector diff = u + belief - p.entity.row(e.value).transpose();
  const Vector proj = diff - w.dot(diff) * w;
  double l1 = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) l1 += std::abs(proj[k] + t[k]);
  return l1;
}

inline std::vector<ScoredItem> oracle_topk(const EmbeddingModel& model, UserId user,
                                           const Vector& belief, std::vector<ItemId> candidates,
                                           std::size_t k) {
  std::vector<ScoredItem> all;
  for (auto i : candidates) all.push_back({i, model.score_user_item(user, i, belief)});
  std::sort(all.begin(), all.end(), [](const ScoredItem& a, const ScoredItem& b) {
    return a.score != b.score ? a.score < b.score : a.item.value < b.item.value;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

inline double oracle_signal(const EmbeddingModel& model, UserId user, const Vector& belief,
                            const std::vector<ItemId>& candidates, double threshold) {
  if (candidates.empty()) return 0.0;
  long below = 0;
  for (auto i : candidates) below += model.score_user_item(user, i, belief) < threshold ? 1 : 0;
  return static_cast<double>(below) / static_cast<double>(candidates.size());
}

}  // namespace convrec::scenarios
