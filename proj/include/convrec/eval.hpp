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
#include <string>
#include <vector>

#include "convrec/conversation.hpp"
#include "json.hpp"

namespace convrec {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Aborted episodes are ignored by every metric.
double success_rate_at(std::span<const Episode> episodes, int t);
// Failures count as their episode's t_max.
double average_turn(std::span<const Episode> episodes);

struct MetricReport {
  std::vector<double> sr_at;  // index k holds SR@(k+1)
  double at = 0.0;
  std::size_t n_episodes = 0;
  int t_max = 0;
  std::string fingerprint;
};

MetricReport evaluate_episodes(std::span<const Episode> episodes, std::string fingerprint = {});

// Empty when the report is internally consistent.
std::vector<std::string> report_violations(const MetricReport& report);

nlohmann::json report_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& j);
std::string curve_csv(const MetricReport& report);

// Episode-level log line: session, user, target, outcome, turns_used, t_max
// and the per-turn transcript.
nlohmann::json episode_record(const Episode& episode, const KnowledgeGraph& kg,
                              const InteractionLog& log);
// Restores the fields metrics need (outcome, turns_used, t_max, session id).
Episode episode_from_record(const nlohmann::json& j);

struct EvalPair {
  UserId user;
  ItemId target;
};

// Every positive of `split`, in user then item order.
std::vector<EvalPair> evaluation_pairs(const InteractionLog& log, Split split);

// Runs one simulated episode per pair. Pairs whose target has no attributes
// are skipped. Episode k uses seed + k.
std::vector<Episode> simulate_pairs(const EmbeddingModel& model, const KnowledgeGraph& kg,
                                    const InteractionLog& log, const Decider& decide,
                                    std::span<const EvalPair> pairs, const ConversationConfig& cfg,
                                    std::uint64_t seed, std::size_t* skipped = nullptr);

struct AblationArm {
  std::string name;
  const EmbeddingModel* model = nullptr;
  Decider decide;
  ConversationConfig config;
};

struct AblationResult {
  std::string name;
  MetricReport report;
};

// Every arm sees the same pairs and seeds. Arms must agree on t_max.
std::vector<AblationResult> run_ablation(std::span<const AblationArm> arms,
                                         const KnowledgeGraph& kg, const InteractionLog& log,
                                         std::span<const EvalPair> pairs, std::uint64_t seed);

}  // namespace convrec
