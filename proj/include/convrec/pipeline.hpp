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
#include <functional>
#include <string>
#include <vector>

#include "convrec/config.hpp"
#include "convrec/dqn.hpp"
#include "convrec/eval.hpp"
#include "convrec/lexicon.hpp"
#include "convrec/templates.hpp"
#include "convrec/trainer.hpp"

namespace convrec {

struct Dataset {
  KnowledgeGraph kg;
  InteractionLog log;
  std::vector<RelationId> dominant_relation;  // synthetic source only
};

Dataset load_dataset(const DataConfig& cfg);
QuestionTemplates load_templates(const DataConfig& cfg);
Lexicon load_lexicon(const DataConfig& cfg, const KnowledgeGraph& kg);

struct EmbeddingRun {
  EmbeddingModel model;
  std::vector<EpochReport> epochs;
};

EmbeddingRun train_embedding(const Dataset& data, const TrainConfig& cfg,
                             const std::function<void(const EpochReport&)>& on_epoch = {});

struct PolicyEpisodeLog {
  std::size_t episode = 0;
  double episode_return = 0.0;  // undiscounted
  double epsilon = 0.0;
  double loss = 0.0;  // mean over this episode's updates, NaN without updates
};

struct PolicyRun {
  PolicyNet net;
  std::vector<PolicyEpisodeLog> log;
};

// Online DQN against the simulator on validation positives.
PolicyRun train_policy(const EmbeddingModel& model, const Dataset& data,
                       const ConversationConfig& conv, const PolicyTrainConfig& cfg,
                       std::uint64_t seed);

std::string policy_log_csv(const PolicyRun& run);

// Mean return of the first and last `fraction` of logged episodes.
std::pair<double, double> return_ends(const PolicyRun& run, double fraction = 0.1);

// Full model with attentive question selection, the average-pooling variant
// with random question selection and its own policy, and a baseline that asks
// random questions until the last turn and then recommends. All three are
// evaluated on the same test pairs.
struct BenchmarkResult {
  std::vector<AblationResult> arms;
  EmbeddingRun full;
  EmbeddingRun average;
  PolicyRun full_policy;
  PolicyRun average_policy;
};

BenchmarkResult run_benchmark(const Dataset& data, const AppConfig& cfg);

}  // namespace convrec
