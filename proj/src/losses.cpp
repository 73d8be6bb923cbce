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

#include "convrec/losses.hpp"

#include <cmath>

#include "attention_math.hpp"

namespace convrec {

Gradient::Gradient(const ModelShape& shape)
    : values_(EmbeddingParams::zeros(shape)),
      user_mark_(shape.users, 0),
      entity_mark_(shape.entities, 0) {}

Eigen::Map<Vector> Gradient::user_row(UserId u) {
  if (!user_mark_[u.index()]) {
    user_mark_[u.index()] = 1;
    touched_users_.push_back(u.value);
  }
  auto& m = values_.user;
  return {m.row(u.value).data(), m.cols()};
}

Eigen::Map<Vector> Gradient::entity_row(EntityId e) {
  if (!entity_mark_[e.index()]) {
    entity_mark_[e.index()] = 1;
    touched_entities_.push_back(e.value);
  }
  auto& m = values_.entity;
  return {m.row(e.value).data(), m.cols()};
}

void Gradient::clear() {
  for (auto u : touched_users_) {
    values_.user.row(u).setZero();
    user_mark_[static_cast<std::size_t>(u)] = 0;
  }
  for (auto e : touched_entities_) {
    values_.entity.row(e).setZero();
    entity_mark_[static_cast<std::size_t>(e)] = 0;
  }
  touched_users_.clear();
  touched_entities_.clear();
  values_.relation.setZero();
  values_.normal.setZero();
  for (auto* net : {&values_.translation_attention, &values_.projection_attention}) {
    net->weight.setZero();
    net->bias.setZero();
    net->head.setZero();
  }
}

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// f = ||P_w(a - b) + t||_1 with P_w = I - w w^T; accumulates upstream * df.
double distance_backward(const Vector& a, const Vector& b, const Vector& t, const Vector& w,
                         double upstream, Vector& ga, Vector& gb, Vector& gt, Vector& gw) {
  const Vector x = a - b;
  const double wx = w.dot(x);
  const Vector e = x - wx * w + t;
  const Vector s = e.unaryExpr(&sign) * upstream;
  const double ws = w.dot(s);
  const Vector gx = s - ws * w;
  gt += s;
  ga += gx;
  gb -= gx;
  gw += -ws * x - wx * s;
  return e.lpNorm<1>();
}

// Backprop from d/d(translation) and d/d(normalized projection) into the
// relation tables, both attention networks and the user row.
void user_backward(const EmbeddingModel& model, const UserView& view, const Vector& g_translation,
                   const Vector& g_projection, Gradient& grad) {
  const auto& p = model.params();
  auto& g = grad.values();
  const Vector& w = view.projection;
  const Vector g_sum = (g_projection - w.dot(g_projection) * w) / view.projection_norm;

  if (model.attention_mode() == AttentionMode::attentive) {
    const Vector u = p.user.row(view.user.index()).transpose();
    const Vector g_alpha = p.relation * g_translation;
    const Vector g_beta = p.normal * g_sum;
    g.relation.noalias() += view.alpha * g_translation.transpose();
    g.normal.noalias() += view.beta * g_sum.transpose();
    auto g_user = grad.user_row(view.user);
    detail::attention_backward(p.translation_attention, u, p.relation, view.alpha_pre,
                               detail::softmax_backward(view.alpha, g_alpha),
                               g.translation_attention, g_user, g.relation);
    detail::attention_backward(p.projection_attention, u, p.normal, view.beta_pre,
                               detail::softmax_backward(view.beta, g_beta),
                               g.projection_attention, g_user, g.normal);
  } else {
    const double share = 1.0 / static_cast<double>(p.relation.rows());
    g.relation.rowwise() += share * g_translation.transpose();
    g.normal.rowwise() += share * g_sum.transpose();
  }
}

double attention_sq_norm(const AttentionNet& n) {
  return n.weight.squaredNorm() + n.bias.squaredNorm() + n.head.squaredNorm();
}

void add_scaled(AttentionNet& into, const AttentionNet& from, double scale) {
  into.weight += scale * from.weight;
  into.bias += scale * from.bias;
  into.head += scale * from.head;
}

}  // namespace

double bpr_loss(const EmbeddingModel& model, std::span<const BprSample> batch, double l2,
                Gradient* grad, double weight) {
  if (batch.empty()) throw ModelError("bpr_loss: empty batch");
  const auto& p = model.params();
  const auto d = static_cast<Eigen::Index>(model.dim());
  double loss = 0.0;
  for (const auto& s : batch) {
    const auto view = model.user_view(s.user);
    if (view.projection_norm <= 1e-12) throw ModelError("user projection has zero norm");
    const Vector u = p.user.row(s.user.index()).transpose();
    const Vector u_hat = u + model.entity_sum(s.belief);
    const EntityId pos = model.item_entities().at(s.positive.index());
    const EntityId neg = model.item_entities().at(s.negative.index());
    const Vector i_pos = p.entity.row(pos.index()).transpose();
    const Vector i_neg = p.entity.row(neg.index()).transpose();

    Vector g_uhat = Vector::Zero(d), g_pos = Vector::Zero(d), g_neg = Vector::Zero(d);
    Vector g_t = Vector::Zero(d), g_w = Vector::Zero(d);
    const double f_pos = translation_distance(u_hat, i_pos, view.translation, view.projection);
    const double f_neg = translation_distance(u_hat, i_neg, view.translation, view.projection);
    const double delta = f_pos - f_neg;
    const double reg = u.squaredNorm() + i_pos.squaredNorm() + i_neg.squaredNorm();
    loss += softplus(delta) + l2 * reg;

    if (grad) {
      const double up = weight * sigmoid(delta);
      distance_backward(u_hat, i_pos, view.translation, view.projection, up, g_uhat, g_pos, g_t,
                        g_w);
      distance_backward(u_hat, i_neg, view.translation, view.projection, -up, g_uhat, g_neg, g_t,
                        g_w);
      grad->user_row(s.user) += g_uhat + 2.0 * l2 * weight * u;
      for (auto e : s.belief) grad->entity_row(e) += g_uhat;
      grad->entity_row(pos) += g_pos + 2.0 * l2 * weight * i_pos;
      grad->entity_row(neg) += g_neg + 2.0 * l2 * weight * i_neg;
      user_backward(model, view, g_t, g_w, *grad);
    }
  }
  if (model.attention_mode() == AttentionMode::attentive) {
    loss += l2 * (attention_sq_norm(p.translation_attention) +
                  attention_sq_norm(p.projection_attention));
    if (grad) {
      add_scaled(grad->values().translation_attention, p.translation_attention, 2.0 * l2 * weight);
      add_scaled(grad->values().projection_attention, p.projection_attention, 2.0 * l2 * weight);
    }
  }
  return loss;
}

double kg_margin_loss(const EmbeddingModel& model, std::span<const TriplePair> batch,
                      double margin, Gradient* grad, double weight) {
  if (batch.empty()) throw ModelError("kg_margin_loss: empty batch");
  const auto& p = model.params();
  const auto d = static_cast<Eigen::Index>(model.dim());
  double loss = 0.0;
  for (const auto& pair : batch) {
    const double f_pos = model.score_triple(pair.positive);
    const double f_neg = model.score_triple(pair.negative);
    const double hinge = margin + f_pos - f_neg;
    if (hinge <= 0.0) continue;
    loss += hinge;
    if (!grad) continue;
    for (const auto& [t, up] : {std::pair{pair.positive, weight}, std::pair{pair.negative, -weight}}) {
      const auto r = t.relation.index();
      Vector gh = Vector::Zero(d), gt = Vector::Zero(d), gr = Vector::Zero(d), gw = Vector::Zero(d);
      distance_backward(p.entity.row(t.head.index()).transpose(),
                        p.entity.row(t.tail.index()).transpose(), p.relation.row(r).transpose(),
                        p.normal.row(r).transpose(), up, gh, gt, gr, gw);
      grad->entity_row(t.head) += gh;
      grad->entity_row(t.tail) += gt;
      grad->values().relation.row(r) += gr.transpose();
      grad->values().normal.row(r) += gw.transpose();
    }
  }
  return loss;
}

JointLoss joint_loss(const EmbeddingModel& model, std::span<const BprSample> bpr,
                     std::span<const TriplePair> kg, double lambda, double l2, double margin,
                     Gradient* grad) {
  JointLoss out;
  if (!bpr.empty()) out.recommendation = bpr_loss(model, bpr, l2, grad, lambda);
  if (!kg.empty()) out.knowledge = kg_margin_loss(model, kg, margin, grad, 1.0 - lambda);
  out.total = lambda * out.recommendation + (1.0 - lambda) * out.knowledge;
  return out;
}

}  // namespace convrec
