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

#include "convrec/dqn.hpp"

#include <algorithm>
#include <cmath>

namespace convrec {

void DqnConfig::validate() const {
  if (batch_size == 0) throw PolicyError("dqn batch_size must be positive");
  if (replay_capacity < batch_size) throw PolicyError("replay capacity below batch size");
  if (hidden == 0) throw PolicyError("dqn hidden width must be positive");
  if (!(learning_rate > 0.0)) throw PolicyError("dqn learning rate must be positive");
  if (!(rms_decay > 0.0 && rms_decay < 1.0)) throw PolicyError("rms_decay must lie in (0, 1)");
  if (target_sync_every <= 0) throw PolicyError("target_sync_every must be positive");
  if (epsilon_start < 0 || epsilon_start > 1 || epsilon_end < 0 || epsilon_end > 1)
    throw PolicyError("epsilon bounds must lie in [0, 1]");
  if (anneal_fraction < 0 || anneal_fraction > 1)
    throw PolicyError("anneal_fraction must lie in [0, 1]");
}

double epsilon_at(std::size_t episode, std::size_t total, const DqnConfig& cfg) {
  const double span = cfg.anneal_fraction * static_cast<double>(total);
  if (span <= 0.0) return cfg.epsilon_end;
  const double frac = std::min(1.0, static_cast<double>(episode) / span);
  return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start);
}

double td_target(const PolicyNet& target, const Transition& t, double eta) {
  if (t.terminal) return t.reward;
  const Eigen::Vector2d q = target.q_values(t.next_state);
  const double best = t.next_ask_allowed ? q.maxCoeff() : q[1];
  return t.reward + eta * best;
}

double td_loss(const PolicyNet& net, const PolicyNet& target, std::span<const Transition> batch,
               double eta, PolicyNet* grad) {
  if (batch.empty()) throw PolicyError("empty td batch");
  if (grad) *grad = PolicyNet::zeros_like(net);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& t : batch) {
    const double y = td_target(target, t, eta);
    const Vector hidden = (net.w2 * t.state + net.b1).array().tanh().matrix();
    const int a = static_cast<int>(t.action);
    const double q = net.w1.row(a).dot(hidden) + net.b2[a];
    const double err = q - y;
    loss += err * err / n;
    if (!grad) continue;
    const double dq = 2.0 * err / n;
    grad->w1.row(a) += dq * hidden.transpose();
    grad->b2[a] += dq;
    const Vector dpre =
        (dq * net.w1.row(a).transpose()).cwiseProduct((1.0 - hidden.array().square()).matrix());
    grad->b1 += dpre;
    grad->w2 += dpre * t.state.transpose();
  }
  return loss;
}

DqnLearner::DqnLearner(PolicyNet init, DqnConfig cfg, double eta, std::uint64_t seed)
    : online_(std::move(init)), cfg_(cfg), eta_(eta), rng_(seed) {
  cfg_.validate();
  target_ = online_;
  sq_ = PolicyNet::zeros_like(online_);
}

double DqnLearner::step(const ReplayBuffer& buffer) {
  const auto batch = buffer.sample(cfg_.batch_size, rng_);
  return step_on(batch);
}

double DqnLearner::step_on(std::span<const Transition> batch) {
  PolicyNet g;
  const double loss = td_loss(online_, target_, batch, eta_, &g);
  auto update = [&](auto& p, auto& s, const auto& gp) {
    s = cfg_.rms_decay * s + (1.0 - cfg_.rms_decay) * gp.cwiseProduct(gp);
    p.array() -= cfg_.learning_rate * gp.array() / (s.array().sqrt() + cfg_.rms_eps);
  };
  update(online_.w1, sq_.w1, g.w1);
  update(online_.b1, sq_.b1, g.b1);
  update(online_.w2, sq_.w2, g.w2);
  update(online_.b2, sq_.b2, g.b2);
  if (!online_.all_finite()) throw PolicyError("non-finite policy parameters after rmsprop step");
  ++steps_;
  if (steps_ % cfg_.target_sync_every == 0) sync_target();
  return loss;
}

}  // namespace convrec
