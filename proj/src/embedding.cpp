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

#include "convrec/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "attention_math.hpp"

namespace convrec {

const char* to_string(AttentionMode mode) {
  return mode == AttentionMode::attentive ? "attentive" : "average";
}

AttentionMode parse_attention_mode(const std::string& s) {
  if (s == "attentive") return AttentionMode::attentive;
  if (s == "average") return AttentionMode::average;
  throw ModelError("unknown attention mode '" + s + "' (expected attentive|average)");
}

EmbeddingParams EmbeddingParams::zeros(const ModelShape& s) {
  const auto d = static_cast<Eigen::Index>(s.dim);
  const auto da = static_cast<Eigen::Index>(s.attention_dim);
  const auto r = static_cast<Eigen::Index>(s.relations);
  EmbeddingParams p;
  p.user = Matrix::Zero(static_cast<Eigen::Index>(s.users), d);
  p.entity = Matrix::Zero(static_cast<Eigen::Index>(s.entities), d);
  p.relation = Matrix::Zero(r, d);
  p.normal = Matrix::Zero(r, d);
  for (auto* net : {&p.translation_attention, &p.projection_attention}) {
    net->weight = Matrix::Zero(da, 2 * d);
    net->bias = Vector::Zero(da);
    net->head = Vector::Zero(da);
  }
  return p;
}

bool EmbeddingParams::all_finite() const {
  return user.allFinite() && entity.allFinite() && relation.allFinite() && normal.allFinite() &&
         translation_attention.weight.allFinite() && translation_attention.bias.allFinite() &&
         translation_attention.head.allFinite() && projection_attention.weight.allFinite() &&
         projection_attention.bias.allFinite() && projection_attention.head.allFinite();
}

Vector project(const Vector& v, const Vector& w) {
  if (v.size() != w.size()) throw ModelError("project: dimension mismatch");
  if (std::abs(w.norm() - 1.0) > 1e-6) throw ModelError("project: normal is not unit length");
  return v - w.dot(v) * w;
}

double translation_distance(const Vector& a, const Vector& b, const Vector& t, const Vector& w) {
  const Vector x = a - b;
  return (x - w.dot(x) * w + t).lpNorm<1>();
}

EmbeddingModel::EmbeddingModel(const ModelShape& shape, std::vector<EntityId> item_entity,
                               AttentionMode mode, std::uint64_t seed)
    : shape_(shape), item_entity_(std::move(item_entity)), mode_(mode) {
  if (shape.dim == 0 || shape.relations == 0 || shape.attention_dim == 0)
    throw ModelError("model shape needs dim, attention_dim and relations > 0");
  params_ = EmbeddingParams::zeros(shape);
  std::mt19937_64 rng(seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(shape.dim));
  std::uniform_real_distribution<double> init(-bound, bound);
  auto fill = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = init(rng);
  };
  fill(params_.user);
  fill(params_.entity);
  fill(params_.relation);
  fill(params_.normal);
  for (auto* net : {&params_.translation_attention, &params_.projection_attention}) {
    fill(net->weight);
    fill(net->bias);
    fill(net->head);
  }
  normalize_relation_normals();
}

EmbeddingModel::EmbeddingModel(const ModelShape& shape, std::vector<EntityId> item_entity,
                               AttentionMode mode, EmbeddingParams params)
    : shape_(shape), item_entity_(std::move(item_entity)), mode_(mode), params_(std::move(params)) {
  const auto d = static_cast<Eigen::Index>(shape.dim);
  if (params_.user.rows() != static_cast<Eigen::Index>(shape.users) ||
      params_.entity.rows() != static_cast<Eigen::Index>(shape.entities) ||
      params_.relation.rows() != static_cast<Eigen::Index>(shape.relations) ||
      params_.normal.rows() != static_cast<Eigen::Index>(shape.relations) ||
      params_.user.cols() != d || params_.entity.cols() != d || params_.relation.cols() != d ||
      params_.normal.cols() != d)
    throw ModelError("parameter tensors do not match the model shape");
}

void EmbeddingModel::normalize_relation_normals() {
  for (Eigen::Index r = 0; r < params_.normal.rows(); ++r) {
    const double n = params_.normal.row(r).norm();
    if (n == 0.0) throw ModelError("relation normal collapsed to zero");
    params_.normal.row(r) /= n;
  }
}

void EmbeddingModel::check_user(UserId user) const {
  if (!user.valid() || user.index() >= shape_.users)
    throw ModelError("unknown user id " + std::to_string(user.value));
}

void EmbeddingModel::check_item(ItemId item) const {
  if (!item.valid() || item.index() >= item_entity_.size())
    throw ModelError("unknown item id " + std::to_string(item.value));
}

UserView EmbeddingModel::user_view(UserId user) const {
  check_user(user);
  UserView v;
  v.user = user;
  const Vector u = params_.user.row(user.index()).transpose();
  const auto n_rel = static_cast<Eigen::Index>(shape_.relations);
  if (mode_ == AttentionMode::attentive) {
    Vector a_scores;
    Vector b_scores;
    detail::attention_forward(params_.translation_attention, u, params_.relation, v.alpha_pre,
                              a_scores);
    detail::attention_forward(params_.projection_attention, u, params_.normal, v.beta_pre,
                              b_scores);
    v.alpha = detail::softmax(a_scores);
    v.beta = detail::softmax(b_scores);
  } else {
    v.alpha = Vector::Constant(n_rel, 1.0 / static_cast<double>(n_rel));
    v.beta = v.alpha;
  }
  v.translation = params_.relation.transpose() * v.alpha;
  v.projection_sum = params_.normal.transpose() * v.beta;
  v.projection_norm = v.projection_sum.norm();
  if (v.projection_norm > 1e-12) {
    v.projection = v.projection_sum / v.projection_norm;
  } else {
    v.projection = Vector::Zero(static_cast<Eigen::Index>(shape_.dim));
  }
  return v;
}

Vector EmbeddingModel::user_projection(UserId user) const {
  auto v = user_view(user);
  if (v.projection_norm <= 1e-12) throw ModelError("user projection has zero norm");
  return v.projection;
}

double EmbeddingModel::score_user_item(UserId user, ItemId item, const Vector& belief) const {
  return score_user_item(user_view(user), item, belief);
}

double EmbeddingModel::score_user_item(const UserView& view, ItemId item,
                                       const Vector& belief) const {
  check_item(item);
  if (belief.size() != static_cast<Eigen::Index>(shape_.dim))
    throw ModelError("belief vector has dimension " + std::to_string(belief.size()) +
                     ", expected " + std::to_string(shape_.dim));
  if (view.projection_norm <= 1e-12) throw ModelError("user projection has zero norm");
  const Vector u_hat = params_.user.row(view.user.index()).transpose() + belief;
  const Vector i = params_.entity.row(item_entity_[item.index()].index()).transpose();
  return translation_distance(u_hat, i, view.translation, view.projection);
}

double EmbeddingModel::score_triple(const Triple& t) const {
  if (!t.head.valid() || !t.tail.valid() || !t.relation.valid() ||
      t.head.index() >= shape_.entities || t.tail.index() >= shape_.entities ||
      t.relation.index() >= shape_.relations)
    throw ModelError("score_triple: unknown id");
  const auto r = t.relation.index();
  return translation_distance(params_.entity.row(t.head.index()).transpose(),
                              params_.entity.row(t.tail.index()).transpose(),
                              params_.relation.row(r).transpose(),
                              params_.normal.row(r).transpose());
}

std::vector<RelationId> EmbeddingModel::rank_relations(UserId user) const {
  const Vector alpha = user_attention(user);
  std::vector<RelationId> order;
  for (Eigen::Index r = 0; r < alpha.size(); ++r) order.emplace_back(static_cast<std::int32_t>(r));
  std::stable_sort(order.begin(), order.end(), [&](RelationId a, RelationId b) {
    return alpha[a.value] > alpha[b.value];
  });
  return order;
}

std::vector<ScoredItem> EmbeddingModel::recommend_topk(UserId user, const Vector& belief,
                                                       std::span<const ItemId> candidates,
                                                       std::size_t k) const {
  if (candidates.empty()) throw ModelError("recommend_topk: empty candidate set");
  if (k == 0) throw ModelError("recommend_topk: k must be >= 1");
  std::vector<ItemId> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  const auto view = user_view(user);
  std::vector<ScoredItem> scored;
  scored.reserve(pool.size());
  for (auto item : pool) scored.push_back({item, score_user_item(view, item, belief)});
  const auto by_score = [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.item < b.item;
  };
  const auto n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    by_score);
  scored.resize(n);
  return scored;
}

Vector EmbeddingModel::entity_sum(std::span<const EntityId> entities) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(shape_.dim));
  for (auto e : entities) {
    if (!e.valid() || e.index() >= shape_.entities)
      throw ModelError("unknown entity id " + std::to_string(e.value));
    out += params_.entity.row(e.index()).transpose();
  }
  return out;
}

}  // namespace convrec
