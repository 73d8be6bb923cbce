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
#include <random>
#include <span>

#include "convrec/policy.hpp"

namespace convrec {

struct DqnConfig {
  std::size_t batch_size = 128;
  std::size_t replay_capacity = 100000;
  std::size_t hidden = 64;
  double learning_rate = 1e-3;  // rmsprop
  double rms_decay = 0.9;
  double rms_eps = 1e-8;
  int target_sync_every = 200;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  double anneal_fraction = 0.5;

  void validate() const;
};

// Linear from epsilon_start to epsilon_end over the first anneal_fraction of
// `total` episodes, then flat.
double epsilon_at(std::size_t episode, std::size_t total, const DqnConfig& cfg);

// y = r for terminal transitions, else r + eta * max_a' Q_target(s', a') with
// ASK dropped from the max when it is not allowed in s'.
double td_target(const PolicyNet& target, const Transition& t, double eta);

// Mean of (Q(s, a) - y)^2 over the batch. Fills `grad` (shaped like `net`)
// with the gradient with respect to the online parameters when non-null.
double td_loss(const PolicyNet& net, const PolicyNet& target, std::span<const Transition> batch,
               double eta, PolicyNet* grad);

class DqnLearner {
 public:
  DqnLearner(PolicyNet init, DqnConfig cfg, double eta, std::uint64_t seed);

  // One rmsprop step on a uniform replay batch; syncs the target network
  // every target_sync_every steps. Throws PolicyError when the buffer is
  // smaller than the batch.
  double step(const ReplayBuffer& buffer);
  // Same update on a caller-supplied batch.
  double step_on(std::span<const Transition> batch);

  void sync_target() { target_ = online_; }

  const PolicyNet& online() const { return online_; }
  const PolicyNet& target() const { return target_; }
  long steps() const { return steps_; }
  const DqnConfig& config() const { return cfg_; }

 private:
  PolicyNet online_, target_, sq_;
  DqnConfig cfg_;
  double eta_;
  std::mt19937_64 rng_;
  long steps_ = 0;
};

}  // namespace convrec
