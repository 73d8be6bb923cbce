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
#include <vector>

#include "convrec/embedding.hpp"
#include "convrec/interactions.hpp"
#include "convrec/kg_store.hpp"
#include "convrec/losses.hpp"

namespace convrec {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double lambda = 0.5;
  std::size_t batch_size = 256;
  double lr_rec = 0.003;  // adagrad: users and attention networks
  double lr_kg = 0.001;   // adam: entities, relations, normals
  double l2_rec = 1e-4;
  double margin = 1.0;
  int epochs = 50;
  std::uint64_t seed = 1;
  std::size_t dim = 100;
  std::size_t attention_dim = 0;  // 0 means "same as dim"
  AttentionMode attention_mode = AttentionMode::attentive;
  // Offline belief: up to this many attribute values of the positive item,
  // or none with probability belief_empty_prob.
  std::size_t belief_max_entities = 3;
  double belief_empty_prob = 0.2;
  // Draw each BPR negative uniformly from all items outside the user's
  // positives instead of from the logged training negatives.
  bool resample_negatives = false;

  void validate() const;
};

struct EpochReport {
  int epoch = 0;
  double recommendation_loss = 0.0;  // mean per BPR sample
  double knowledge_loss = 0.0;       // mean per triple pair
  double total_loss = 0.0;           // lambda-weighted mean
  double max_normal_deviation = 0.0;  // max over every step of the epoch
  std::size_t bpr_samples = 0;
  std::size_t triple_pairs = 0;
};

// Initialized model sized to the graph and log.
EmbeddingModel make_model(const KnowledgeGraph& kg, const InteractionLog& log,
                          const TrainConfig& config);

// Offline joint training. Recommendation parameters (user table, attention
// networks) step with adagrad; KG parameters (entity, relation and normal
// tables) step with adam. Normals are renormalized after every step.
class Trainer {
 public:
  Trainer(EmbeddingModel& model, const KnowledgeGraph& kg, const InteractionLog& log,
          TrainConfig config);

  EpochReport train_epoch();

  // Applies one optimizer step from an already filled gradient.
  void apply(Gradient& grad);

  // Belief entities for a positive item according to the config.
  std::vector<EntityId> sample_belief(ItemId item);

  int epochs_done() const { return epoch_; }

 private:
  struct AdagradNet {
    Matrix weight;
    Vector bias, head;
  };

  EmbeddingModel& model_;
  const KnowledgeGraph& kg_;
  const InteractionLog& log_;
  TrainConfig config_;
  std::mt19937_64 rng_;
  Gradient grad_;
  int epoch_ = 0;
  long adam_step_ = 0;

  Matrix user_acc_;
  AdagradNet translation_acc_, projection_acc_;
  Matrix entity_m_, entity_v_, relation_m_, relation_v_, normal_m_, normal_v_;
  std::vector<Interaction> train_positives_;
};

}  // namespace convrec
