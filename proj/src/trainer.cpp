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

#include "convrec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace convrec {

namespace {

constexpr double kAdagradEps = 1e-10;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

template <class P, class G, class A>
void adagrad(P&& param, const G& grad, A&& acc, double lr) {
  acc.array() += grad.array().square();
  param.array() -= lr * grad.array() / (acc.array().sqrt() + kAdagradEps);
}

template <class P, class G, class M, class V>
void adam(P&& param, const G& grad, M&& m, V&& v, double lr, long step) {
  m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
  v.array() = kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * grad.array().square();
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kAdamEps);
}

// Only rows a step touched can have gone non-finite.
bool step_finite(const EmbeddingParams& p, const Gradient& g) {
  for (auto u : g.touched_users())
    if (!p.user.row(u).allFinite()) return false;
  for (auto e : g.touched_entities())
    if (!p.entity.row(e).allFinite()) return false;
  for (const auto* net : {&p.translation_attention, &p.projection_attention})
    if (!net->weight.allFinite() || !net->bias.allFinite() || !net->head.allFinite()) return false;
  return p.relation.allFinite() && p.normal.allFinite();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw TrainingError("lambda must lie in [0, 1]");
  if (!(lr_rec > 0.0) || !(lr_kg > 0.0)) throw TrainingError("learning rates must be > 0");
  if (batch_size == 0) throw TrainingError("batch_size must be >= 1");
  if (l2_rec < 0.0) throw TrainingError("l2_rec must be >= 0");
  if (!(margin > 0.0)) throw TrainingError("margin must be > 0");
  if (dim == 0) throw TrainingError("dim must be >= 1");
  if (belief_empty_prob < 0.0 || belief_empty_prob > 1.0)
    throw TrainingError("belief_empty_prob must lie in [0, 1]");
}

EmbeddingModel make_model(const KnowledgeGraph& kg, const InteractionLog& log,
                          const TrainConfig& config) {
  config.validate();
  ModelShape shape;
  shape.users = log.num_users();
  shape.entities = kg.num_entities();
  shape.relations = kg.num_relations();
  shape.dim = config.dim;
  shape.attention_dim = config.attention_dim == 0 ? config.dim : config.attention_dim;
  return EmbeddingModel(shape, kg.item_entities(), config.attention_mode, config.seed);
}

Trainer::Trainer(EmbeddingModel& model, const KnowledgeGraph& kg, const InteractionLog& log,
                 TrainConfig config)
    : model_(model),
      kg_(kg),
      log_(log),
      config_(config),
      rng_(config.seed ^ 0x9e3779b97f4a7c15ULL),
      grad_(model.shape()) {
  config_.validate();
  const auto& p = model_.params();
  user_acc_ = Matrix::Zero(p.user.rows(), p.user.cols());
  for (auto [acc, net] : {std::pair{&translation_acc_, &p.translation_attention},
                          std::pair{&projection_acc_, &p.projection_attention}}) {
    acc->weight = Matrix::Zero(net->weight.rows(), net->weight.cols());
    acc->bias = Vector::Zero(net->bias.size());
    acc->head = Vector::Zero(net->head.size());
  }
  entity_m_ = entity_v_ = Matrix::Zero(p.entity.rows(), p.entity.cols());
  relation_m_ = relation_v_ = Matrix::Zero(p.relation.rows(), p.relation.cols());
  normal_m_ = normal_v_ = Matrix::Zero(p.normal.rows(), p.normal.cols());
  train_positives_ = log_.select(Label::positive, Split::train);
  if (train_positives_.empty()) throw TrainingError("no training positives");
}

std::vector<EntityId> Trainer::sample_belief(ItemId item) {
  std::bernoulli_distribution empty(config_.belief_empty_prob);
  if (config_.belief_max_entities == 0 || empty(rng_)) return {};
  std::vector<EntityId> values;
  for (const auto& [rel, vals] : kg_.item_attributes(item))
    values.insert(values.end(), vals.begin(), vals.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::shuffle(values.begin(), values.end(), rng_);
  values.resize(std::min(values.size(), config_.belief_max_entities));
  std::sort(values.begin(), values.end());
  return values;
}

void Trainer::apply(Gradient& grad) {
  auto& p = model_.params();
  const auto& g = grad.values();
  ++adam_step_;

  for (auto u : grad.touched_users())
    adagrad(p.user.row(u), g.user.row(u), user_acc_.row(u), config_.lr_rec);
  if (model_.attention_mode() == AttentionMode::attentive) {
    for (auto [net, gnet, acc] :
         {std::tuple{&p.translation_attention, &g.translation_attention, &translation_acc_},
          std::tuple{&p.projection_attention, &g.projection_attention, &projection_acc_}}) {
      adagrad(net->weight, gnet->weight, acc->weight, config_.lr_rec);
      adagrad(net->bias, gnet->bias, acc->bias, config_.lr_rec);
      adagrad(net->head, gnet->head, acc->head, config_.lr_rec);
    }
  }

  for (auto e : grad.touched_entities())
    adam(p.entity.row(e), g.entity.row(e), entity_m_.row(e), entity_v_.row(e), config_.lr_kg,
         adam_step_);
  adam(p.relation, g.relation, relation_m_, relation_v_, config_.lr_kg, adam_step_);
  adam(p.normal, g.normal, normal_m_, normal_v_, config_.lr_kg, adam_step_);
  model_.normalize_relation_normals();
}

EpochReport Trainer::train_epoch() {
  ++epoch_;
  std::vector<Interaction> order = train_positives_;
  std::shuffle(order.begin(), order.end(), rng_);
  std::uniform_int_distribution<std::size_t> pick_item(0, model_.num_items() - 1);
  std::uniform_int_distribution<std::size_t> pick_triple(0, kg_.num_triples() - 1);

  EpochReport report;
  report.epoch = epoch_;
  std::vector<BprSample> bpr;
  std::vector<TriplePair> kg_pairs;
  for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
    const auto end = std::min(order.size(), start + config_.batch_size);
    bpr.clear();
    kg_pairs.clear();
    for (std::size_t k = start; k < end; ++k) {
      const auto& pos = order[k];
      const auto& negs = log_.items(pos.user, Label::negative, Split::train);
      ItemId neg;
      if (!negs.empty() && !config_.resample_negatives) {
        std::uniform_int_distribution<std::size_t> pick(0, negs.size() - 1);
        neg = negs[pick(rng_)];
      } else {
        const auto positives = log_.positives(pos.user);
        do {
          neg = ItemId(pick_item(rng_));
        } while (std::binary_search(positives.begin(), positives.end(), neg));
      }
      bpr.push_back({pos.user, pos.item, neg, sample_belief(pos.item)});
      const Triple& t = kg_.triples()[pick_triple(rng_)];
      kg_pairs.push_back({t, sample_negative_triple(kg_, t, rng_)});
    }

    grad_.clear();
    const auto loss = joint_loss(model_, bpr, kg_pairs, config_.lambda, config_.l2_rec,
                                 config_.margin, &grad_);
    if (!std::isfinite(loss.total))
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch_) + ", sample " +
                          std::to_string(start));
    apply(grad_);
    if (!step_finite(model_.params(), grad_))
      throw TrainingError("non-finite parameters after step at epoch " + std::to_string(epoch_) +
                          ", sample " + std::to_string(start));
    const auto& normal = model_.params().normal;
    for (Eigen::Index r = 0; r < normal.rows(); ++r)
      report.max_normal_deviation =
          std::max(report.max_normal_deviation, std::abs(normal.row(r).norm() - 1.0));
    report.recommendation_loss += loss.recommendation;
    report.knowledge_loss += loss.knowledge;
    report.bpr_samples += bpr.size();
    report.triple_pairs += kg_pairs.size();
  }
  report.recommendation_loss /= static_cast<double>(report.bpr_samples);
  report.knowledge_loss /= static_cast<double>(report.triple_pairs);
  report.total_loss = config_.lambda * report.recommendation_loss +
                      (1.0 - config_.lambda) * report.knowledge_loss;
  return report;
}

}  // namespace convrec
