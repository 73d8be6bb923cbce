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
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "convrec/ids.hpp"
#include "convrec/kg_store.hpp"

namespace convrec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// How user-specific relation weights are formed. `average` replaces both
// attention networks with uniform pooling over relations.
enum class AttentionMode : std::uint8_t { attentive, average };

const char* to_string(AttentionMode mode);
AttentionMode parse_attention_mode(const std::string& s);

struct ModelShape {
  std::size_t users = 0;
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t dim = 100;
  std::size_t attention_dim = 100;
};

// Scores h^T ReLU(W (u (+) x) + b) for every relation input x.
struct AttentionNet {
  Matrix weight;  // attention_dim x 2*dim
  Vector bias;    // attention_dim
  Vector head;    // attention_dim
};

struct EmbeddingParams {
  Matrix user;      // users x dim
  Matrix entity;    // entities x dim
  Matrix relation;  // relations x dim, translation vectors
  Matrix normal;    // relations x dim, unit hyperplane normals
  AttentionNet translation_attention;
  AttentionNet projection_attention;

  static EmbeddingParams zeros(const ModelShape& shape);
  bool all_finite() const;
};

// Everything about one user that does not depend on the item: attention
// weights, translation vector and hyperplane normal, plus the pre-activations
// needed for backprop.
struct UserView {
  UserId user;
  Vector alpha;        // translation attention over relations
  Vector beta;         // projection attention over relations
  Vector translation;  // sum_r alpha_r * r
  Vector projection_sum;
  double projection_norm = 0.0;
  Vector projection;  // projection_sum / projection_norm
  Matrix alpha_pre;   // relations x attention_dim
  Matrix beta_pre;
};

struct ScoredItem {
  ItemId item;
  double score;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Removes the component of `v` along the unit normal `w`. Throws ModelError
// when `w` is not unit length (tolerance 1e-6).
Vector project(const Vector& v, const Vector& w);

// L1 translation distance: || P_w(a - b) + t ||_1 with P_w = I - w w^T.
double translation_distance(const Vector& a, const Vector& b, const Vector& t,
                            const Vector& w);

class EmbeddingModel {
 public:
  EmbeddingModel() = default;

  // Parameters are drawn uniform(-6/sqrt(d), 6/sqrt(d)); normals are then
  // rescaled to unit length.
  EmbeddingModel(const ModelShape& shape, std::vector<EntityId> item_entity,
                 AttentionMode mode, std::uint64_t seed);

  // Adopts existing parameters (checkpoint reload).
  EmbeddingModel(const ModelShape& shape, std::vector<EntityId> item_entity,
                 AttentionMode mode, EmbeddingParams params);

  const ModelShape& shape() const { return shape_; }
  std::size_t dim() const { return shape_.dim; }
  AttentionMode attention_mode() const { return mode_; }
  EmbeddingParams& params() { return params_; }
  const EmbeddingParams& params() const { return params_; }
  const std::vector<EntityId>& item_entities() const { return item_entity_; }
  std::size_t num_items() const { return item_entity_.size(); }

  UserView user_view(UserId user) const;

  Vector user_attention(UserId user) const { return user_view(user).alpha; }
  Vector projection_attention(UserId user) const { return user_view(user).beta; }
  Vector user_translation(UserId user) const { return user_view(user).translation; }
  // Throws ModelError when the weighted normal sum vanishes.
  Vector user_projection(UserId user) const;

  // f(u, i | b). Lower is a stronger preference.
  double score_user_item(UserId user, ItemId item, const Vector& belief) const;
  double score_user_item(const UserView& view, ItemId item, const Vector& belief) const;

  double score_triple(const Triple& t) const;

  // Relations by translation attention, descending; ties by ascending id.
  std::vector<RelationId> rank_relations(UserId user) const;

  // The k lowest-scoring candidates, ascending by score then item id.
  std::vector<ScoredItem> recommend_topk(UserId user, const Vector& belief,
                                         std::span<const ItemId> candidates,
                                         std::size_t k) const;

  Vector entity_sum(std::span<const EntityId> entities) const;

  void normalize_relation_normals();

 private:
  void check_user(UserId user) const;
  void check_item(ItemId item) const;

  ModelShape shape_;
  std::vector<EntityId> item_entity_;
  AttentionMode mode_ = AttentionMode::attentive;
  EmbeddingParams params_;
};

}  // namespace convrec
