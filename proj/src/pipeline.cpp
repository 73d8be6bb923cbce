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

#include "convrec/pipeline.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace convrec {

Dataset load_dataset(const DataConfig& cfg) {
  if (cfg.source == "synthetic") {
    auto s = make_synthetic(cfg.synthetic);
    return {std::move(s.kg), std::move(s.log), std::move(s.dominant_relation)};
  }
  if (cfg.source != "files") throw ConfigError("unknown data source '" + cfg.source + "'");
  std::set<std::string> blocklist;
  if (!cfg.relation_blocklist.empty()) blocklist = load_relation_blocklist(cfg.relation_blocklist);
  auto kg = load_triples(cfg.triples, blocklist);
  auto log = load_interactions(cfg.interactions, cfg.rating_threshold, kg, cfg.split);
  return {std::move(kg), std::move(log), {}};
}

QuestionTemplates load_templates(const DataConfig& cfg) {
  if (cfg.templates.empty()) return QuestionTemplates(cfg.domain);
  return QuestionTemplates::load(cfg.templates, cfg.domain);
}

Lexicon load_lexicon(const DataConfig& cfg, const KnowledgeGraph& kg) {
  auto lex = Lexicon::from_graph(kg);
  if (!cfg.aliases.empty()) lex.load_aliases(cfg.aliases, kg);
  return lex;
}

EmbeddingRun train_embedding(const Dataset& data, const TrainConfig& cfg,
                             const std::function<void(const EpochReport&)>& on_epoch) {
  EmbeddingRun run{make_model(data.kg, data.log, cfg), {}};
  Trainer trainer(run.model, data.kg, data.log, cfg);
  for (int e = 0; e < cfg.epochs; ++e) {
    run.epochs.push_back(trainer.train_epoch());
    if (on_epoch) on_epoch(run.epochs.back());
  }
  return run;
}

PolicyRun train_policy(const EmbeddingModel& model, const Dataset& data,
                       const ConversationConfig& conv, const PolicyTrainConfig& cfg,
                       std::uint64_t seed) {
  std::vector<EvalPair> pairs;
  for (const auto& p : evaluation_pairs(data.log, Split::validation))
    if (!data.kg.item_attributes(p.target).empty()) pairs.push_back(p);
  if (pairs.empty()) throw TrainingError("no validation positives to train the policy on");

  const std::size_t state_dim = model.dim() + model.shape().relations + 1;
  DqnLearner learner(PolicyNet::random(state_dim, cfg.dqn.hidden, seed), cfg.dqn, conv.rewards.eta,
                     seed + 1);
  ReplayBuffer buffer(cfg.dqn.replay_capacity);
  std::mt19937_64 rng(seed + 2);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);

  PolicyRun run;
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    const auto& p = pairs[pick(rng)];
    const double eps = epsilon_at(e, cfg.episodes, cfg.dqn);
    SimulatedResponder responder(*start_session(p.user, p.target, data.kg));
    const Episode ep =
        run_episode(model, epsilon_decider(learner.online(), eps, rng), responder, p.user,
                    candidate_pool(data.log, p.user, data.kg.num_items()), conv, rng());
    PolicyEpisodeLog row;
    row.episode = e;
    row.epsilon = eps;
    for (const auto& t : ep.turns) row.episode_return += t.reward;
    for (auto& tr : episode_transitions(ep)) buffer.push(std::move(tr));

    double loss = 0.0;
    std::size_t updates = 0;
    if (buffer.size() >= cfg.dqn.batch_size) {
      for (std::size_t k = 0; k < cfg.updates_per_episode; ++k, ++updates)
        loss += learner.step(buffer);
    }
    row.loss = updates ? loss / static_cast<double>(updates)
                       : std::numeric_limits<double>::quiet_NaN();
    run.log.push_back(row);
  }
  run.net = learner.online();
  return run;
}

std::string policy_log_csv(const PolicyRun& run) {
  std::ostringstream os;
  os.precision(17);
  os << "episode,return,epsilon,loss\n";
  for (const auto& r : run.log) {
    os << r.episode << ',' << r.episode_return << ',' << r.epsilon << ',';
    if (!std::isnan(r.loss)) os << r.loss;
    os << '\n';
  }
  return os.str();
}

std::pair<double, double> return_ends(const PolicyRun& run, double fraction) {
  const auto n = run.log.size();
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * static_cast<double>(n)));
  if (n < k) return {0.0, 0.0};
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    first += run.log[i].episode_return;
    last += run.log[n - k + i].episode_return;
  }
  return {first / static_cast<double>(k), last / static_cast<double>(k)};
}

BenchmarkResult run_benchmark(const Dataset& data, const AppConfig& cfg) {
  TrainConfig full_cfg = cfg.embedding;
  full_cfg.attention_mode = AttentionMode::attentive;
  TrainConfig avg_cfg = cfg.embedding;
  avg_cfg.attention_mode = AttentionMode::average;

  ConversationConfig full_conv = cfg.conversation;
  full_conv.selection = QuestionSelection::attention;
  ConversationConfig random_conv = cfg.conversation;
  random_conv.selection = QuestionSelection::random;

  BenchmarkResult out;
  out.full = train_embedding(data, full_cfg);
  out.average = train_embedding(data, avg_cfg);
  out.full_policy = train_policy(out.full.model, data, full_conv, cfg.policy, cfg.seeds.policy);
  out.average_policy =
      train_policy(out.average.model, data, random_conv, cfg.policy, cfg.seeds.policy);

  const std::vector<AblationArm> arms = {
      {"full", &out.full.model, greedy_decider(out.full_policy.net), full_conv},
      {"kbqg_a", &out.average.model, greedy_decider(out.average_policy.net), random_conv},
      {"random_baseline", &out.full.model, fixed_decider(Action::ask), random_conv},
  };
  const auto pairs = evaluation_pairs(data.log, Split::test);
  out.arms = run_ablation(arms, data.kg, data.log, pairs, cfg.seeds.simulation);
  return out;
}

}  // namespace convrec
