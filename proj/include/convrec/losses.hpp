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

namespace convrec {

// Gradient buffer shaped like EmbeddingParams. User and entity rows are
// tracked so that clearing and sparse optimizer updates only visit rows a
// batch actually touched.
class Gradient {
 public:
  explicit Gradient(const ModelShape& shape);

  EmbeddingParams& values() { return values_; }
  const EmbeddingParams& values() const { return values_; }

  Eigen::Map<Vector> user_row(UserId u);
  Eigen::Map<Vector> entity_row(EntityId e);

  const std::vector<std::int32_t>& touched_users() const { return touched_users_; }
  const std::vector<std::int32_t>& touched_entities() const { return touched_entities_; }

  void clear();

 private:
  EmbeddingParams values_;
  std::vector<std::uint8_t> user_mark_;
  std::vector<std::uint8_t> entity_mark_;
  std::vector<std::int32_t> touched_users_;
  std::vector<std::int32_t> touched_entities_;
};

// One BPR training instance. `belief` lists the affirmed attribute-value
// entities whose embedding sum augments the user for both items.
struct BprSample {
  UserId user;
  ItemId positive;
  ItemId negative;
  std::vector<EntityId> belief;
};

struct TriplePair {
  Triple positive;
  Triple negative;
};

// sum -ln sigmoid(f(u,i-) - f(u,i+)) plus l2 * (||u||^2 + ||i+||^2 + ||i-||^2)
// per sample plus l2 * ||attention params||^2 once per batch. When `grad` is
// given, weight * d(loss)/d(params) is accumulated into it. Throws on an
// empty batch.
double bpr_loss(const EmbeddingModel& model, std::span<const BprSample> batch, double l2,
                Gradient* grad = nullptr, double weight = 1.0);

// sum max(0, margin + f(pos) - f(neg)). Same gradient convention.
double kg_margin_loss(const EmbeddingModel& model, std::span<const TriplePair> batch,
                      double margin, Gradient* grad = nullptr, double weight = 1.0);

struct JointLoss {
  double recommendation = 0.0;
  double knowledge = 0.0;
  double total = 0.0;
};

// lambda * bpr + (1 - lambda) * kg. An empty side contributes zero.
JointLoss joint_loss(const EmbeddingModel& model, std::span<const BprSample> bpr,
                     std::span<const TriplePair> kg, double lambda, double l2, double margin,
                     Gradient* grad = nullptr);

}  // namespace convrec
