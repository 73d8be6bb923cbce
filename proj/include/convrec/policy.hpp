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
#include <deque>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "convrec/embedding.hpp"

namespace convrec {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Action : std::uint8_t { ask = 0, recommend = 1 };

const char* to_string(Action a);

// Two-output Q network: q(s) = W1 tanh(W2 s + b1) + b2.
struct PolicyNet {
  Matrix w1;  // 2 x hidden
  Vector b1;  // hidden
  Matrix w2;  // hidden x state_dim
  Vector b2;  // 2

  // Weights uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
  static PolicyNet random(std::size_t state_dim, std::size_t hidden, std::uint64_t seed);
  static PolicyNet zeros_like(const PolicyNet& other);

  std::size_t state_dim() const { return static_cast<std::size_t>(w2.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(w2.rows()); }

  Eigen::Vector2d q_values(const Vector& state) const;
  bool all_finite() const;

  friend bool operator==(const PolicyNet& a, const PolicyNet& b);
};

// Greedy choice over Q-values; ties go to ASK. When ASK is not allowed the
// answer is always RECOMMEND.
Action greedy_action(const Eigen::Vector2d& q, bool ask_allowed = true);

// Epsilon-greedy. Exploration draws uniformly over the allowed actions.
Action act(const PolicyNet& net, const Vector& state, double epsilon, std::mt19937_64& rng,
           bool ask_allowed = true);

enum class TurnOutcome : std::uint8_t {
  informative_answer,
  uninformative_answer,
  accepted_recommendation,
  rejected_or_timeout,
};

const char* to_string(TurnOutcome o);

struct RewardConfig {
  double r_tp = 0.1;
  double r_tn = -0.1;
  double r_ta = 1.0;
  double r_tm = -0.3;
  double eta = 0.9;
  int t_max = 0;  // 0 means |R| + 1

  void validate() const;
};

double reward(TurnOutcome outcome, const RewardConfig& cfg);

// sum_{k} eta^k r_k, discounting from the first element.
double discounted_return(std::span<const double> rewards, double eta);

struct Transition {
  Vector state;
  Action action = Action::ask;
  double reward = 0.0;
  Vector next_state;  // empty when terminal
  bool terminal = false;
  bool next_ask_allowed = true;
};

// Fixed-capacity FIFO experience memory. push and sample are mutually
// exclusive so actors on several threads may feed one buffer.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 100000);

  void push(Transition t);
  // Uniform with replacement.
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<Transition> items_;
};

}  // namespace convrec
