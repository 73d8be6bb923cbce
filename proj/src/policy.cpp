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

#include "convrec/policy.hpp"

#include <cmath>

namespace convrec {

const char* to_string(Action a) { return a == Action::ask ? "ask" : "recommend"; }

const char* to_string(TurnOutcome o) {
  switch (o) {
    case TurnOutcome::informative_answer:
      return "informative_answer";
    case TurnOutcome::uninformative_answer:
      return "uninformative_answer";
    case TurnOutcome::accepted_recommendation:
      return "accepted_recommendation";
    case TurnOutcome::rejected_or_timeout:
      return "rejected_or_timeout";
  }
  return "?";
}

PolicyNet PolicyNet::random(std::size_t state_dim, std::size_t hidden, std::uint64_t seed) {
  if (state_dim == 0 || hidden == 0) throw PolicyError("policy net needs positive sizes");
  std::mt19937_64 rng(seed);
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto s = static_cast<Eigen::Index>(state_dim);
  auto fill = [&](Matrix& m, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  };
  PolicyNet net;
  net.w2.resize(h, s);
  fill(net.w2, 1.0 / std::sqrt(static_cast<double>(state_dim)));
  net.b1 = Vector::Zero(h);
  net.w1.resize(2, h);
  fill(net.w1, 1.0 / std::sqrt(static_cast<double>(hidden)));
  net.b2 = Vector::Zero(2);
  return net;
}

PolicyNet PolicyNet::zeros_like(const PolicyNet& other) {
  PolicyNet z;
  z.w1 = Matrix::Zero(other.w1.rows(), other.w1.cols());
  z.b1 = Vector::Zero(other.b1.size());
  z.w2 = Matrix::Zero(other.w2.rows(), other.w2.cols());
  z.b2 = Vector::Zero(other.b2.size());
  return z;
}

Eigen::Vector2d PolicyNet::q_values(const Vector& state) const {
  if (state.size() != w2.cols())
    throw PolicyError("state has length " + std::to_string(state.size()) + ", policy expects " +
                      std::to_string(w2.cols()));
  const Vector hidden = (w2 * state + b1).array().tanh().matrix();
  return w1 * hidden + b2;
}

bool PolicyNet::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

bool operator==(const PolicyNet& a, const PolicyNet& b) {
  return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
}

Action greedy_action(const Eigen::Vector2d& q, bool ask_allowed) {
  if (!ask_allowed) return Action::recommend;
  return q[1] > q[0] ? Action::recommend : Action::ask;
}

Action act(const PolicyNet& net, const Vector& state, double epsilon, std::mt19937_64& rng,
           bool ask_allowed) {
  if (epsilon < 0.0 || epsilon > 1.0) throw PolicyError("epsilon must lie in [0, 1]");
  const Eigen::Vector2d q = net.q_values(state);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < epsilon) {
    if (!ask_allowed) return Action::recommend;
    return unit(rng) < 0.5 ? Action::ask : Action::recommend;
  }
  return greedy_action(q, ask_allowed);
}

void RewardConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw PolicyError("eta must lie in (0, 1)");
  if (t_max < 0) throw PolicyError("t_max must be >= 0");
}

double reward(TurnOutcome outcome, const RewardConfig& cfg) {
  switch (outcome) {
    case TurnOutcome::informative_answer:
      return cfg.r_tp;
    case TurnOutcome::uninformative_answer:
      return cfg.r_tn;
    case TurnOutcome::accepted_recommendation:
      return cfg.r_ta;
    case TurnOutcome::rejected_or_timeout:
      return cfg.r_tm;
  }
  return 0.0;
}

double discounted_return(std::span<const double> rewards, double eta) {
  double total = 0.0;
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) total = *it + eta * total;
  return total;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw PolicyError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  std::lock_guard lock(mu_);
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(t));
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  std::lock_guard lock(mu_);
  if (items_.size() < n)
    throw PolicyError("replay buffer holds " + std::to_string(items_.size()) +
                      " transitions, batch needs " + std::to_string(n));
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(items_[pick(rng)]);
  return out;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

}  // namespace convrec
