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

#include "convrec/eval.hpp"

#include <cmath>
#include <sstream>

namespace convrec {

namespace {

std::size_t counted(std::span<const Episode> episodes) {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.outcome != EpisodeOutcome::aborted;
  return n;
}

}  // namespace

double success_rate_at(std::span<const Episode> episodes, int t) {
  const auto n = counted(episodes);
  if (n == 0) throw EvalError("success rate of an empty episode set");
  std::size_t hits = 0;
  for (const auto& e : episodes) {
    if (e.outcome == EpisodeOutcome::aborted) continue;
    if (t > e.t_max) throw EvalError("turn " + std::to_string(t) + " exceeds t_max");
    hits += e.outcome == EpisodeOutcome::success && e.turns_used <= t;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double average_turn(std::span<const Episode> episodes) {
  const auto n = counted(episodes);
  if (n == 0) throw EvalError("average turn of an empty episode set");
  double total = 0.0;
  for (const auto& e : episodes) {
    if (e.outcome == EpisodeOutcome::aborted) continue;
    total += e.outcome == EpisodeOutcome::success ? e.turns_used : e.t_max;
  }
  return total / static_cast<double>(n);
}

MetricReport evaluate_episodes(std::span<const Episode> episodes, std::string fingerprint) {
  MetricReport r;
  r.n_episodes = counted(episodes);
  if (r.n_episodes == 0) throw EvalError("no completed episodes to evaluate");
  for (const auto& e : episodes) {
    if (e.outcome == EpisodeOutcome::aborted) continue;
    if (r.t_max == 0) r.t_max = e.t_max;
    if (e.t_max != r.t_max) throw EvalError("episodes disagree on t_max");
  }
  for (int t = 1; t <= r.t_max; ++t) r.sr_at.push_back(success_rate_at(episodes, t));
  r.at = average_turn(episodes);
  r.fingerprint = std::move(fingerprint);
  return r;
}

std::vector<std::string> report_violations(const MetricReport& r) {
  std::vector<std::string> out;
  if (static_cast<int>(r.sr_at.size()) != r.t_max) out.push_back("sr_at length differs from t_max");
  for (std::size_t k = 0; k < r.sr_at.size(); ++k) {
    if (r.sr_at[k] < 0.0 || r.sr_at[k] > 1.0) out.push_back("sr_at outside [0, 1]");
    if (k > 0 && r.sr_at[k] < r.sr_at[k - 1]) out.push_back("sr_at decreases at T=" + std::to_string(k + 1));
  }
  if (r.at > r.t_max || r.at < 0.0) out.push_back("average turn outside [0, t_max]");
  return out;
}

nlohmann::json report_json(const MetricReport& r) {
  return {{"sr_at", r.sr_at}, {"at", r.at}, {"n_episodes", r.n_episodes},
          {"t_max", r.t_max}, {"fingerprint", r.fingerprint}};
}

MetricReport report_from_json(const nlohmann::json& j) {
  MetricReport r;
  r.sr_at = j.at("sr_at").get<std::vector<double>>();
  r.at = j.at("at").get<double>();
  r.n_episodes = j.at("n_episodes").get<std::size_t>();
  r.t_max = j.at("t_max").get<int>();
  r.fingerprint = j.value("fingerprint", "");
  return r;
}

std::string curve_csv(const MetricReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "T,sr\n";
  for (std::size_t k = 0; k < r.sr_at.size(); ++k) os << k + 1 << ',' << r.sr_at[k] << '\n';
  return os.str();
}

nlohmann::json episode_record(const Episode& episode, const KnowledgeGraph& kg,
                              const InteractionLog& log) {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& t : episode.turns) turns.push_back(turn_json(t, kg));
  return {{"session", episode.session_id},
          {"user", log.user_name(episode.user)},
          {"target", episode.target ? kg.item_name(*episode.target) : ""},
          {"outcome", to_string(episode.outcome)},
          {"turns_used", episode.turns_used},
          {"t_max", episode.t_max},
          {"turns", turns}};
}

Episode episode_from_record(const nlohmann::json& j) {
  Episode e;
  try {
    e.session_id = j.at("session").get<std::string>();
    const auto outcome = j.at("outcome").get<std::string>();
    if (outcome == "success") {
      e.outcome = EpisodeOutcome::success;
    } else if (outcome == "failure") {
      e.outcome = EpisodeOutcome::failure;
    } else if (outcome == "aborted") {
      e.outcome = EpisodeOutcome::aborted;
    } else {
      throw EvalError("unknown episode outcome '" + outcome + "'");
    }
    e.turns_used = j.at("turns_used").get<int>();
    e.t_max = j.at("t_max").get<int>();
  } catch (const nlohmann::json::exception& ex) {
    throw EvalError(std::string("malformed episode record: ") + ex.what());
  }
  if (e.turns_used < 0 || e.turns_used > e.t_max || e.t_max <= 0)
    throw EvalError("episode record " + e.session_id + " has inconsistent turn counts");
  return e;
}

std::vector<EvalPair> evaluation_pairs(const InteractionLog& log, Split split) {
  std::vector<EvalPair> out;
  for (std::size_t u = 0; u < log.num_users(); ++u) {
    const UserId user(static_cast<int32_t>(u));
    for (auto item : log.items(user, Label::positive, split)) out.push_back({user, item});
  }
  return out;
}

std::vector<Episode> simulate_pairs(const EmbeddingModel& model, const KnowledgeGraph& kg,
                                    const InteractionLog& log, const Decider& decide,
                                    std::span<const EvalPair> pairs, const ConversationConfig& cfg,
                                    std::uint64_t seed, std::size_t* skipped) {
  std::vector<Episode> out;
  std::size_t n_skipped = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    auto sim = start_session(p.user, p.target, kg);
    if (!sim) {
      ++n_skipped;
      continue;
    }
    SimulatedResponder responder(std::move(*sim));
    const std::string id = log.user_name(p.user) + "/" + kg.item_name(p.target);
    out.push_back(run_episode(model, decide, responder, p.user,
                              candidate_pool(log, p.user, kg.num_items()), cfg, seed + k, id));
  }
  if (skipped) *skipped = n_skipped;
  return out;
}

std::vector<AblationResult> run_ablation(std::span<const AblationArm> arms,
                                         const KnowledgeGraph& kg, const InteractionLog& log,
                                         std::span<const EvalPair> pairs, std::uint64_t seed) {
  std::vector<AblationResult> out;
  int t_max = -1;
  for (const auto& arm : arms) {
    if (!arm.model) throw EvalError("ablation arm '" + arm.name + "' has no model");
    const int arm_t_max = arm.config.t_max > 0
                              ? arm.config.t_max
                              : static_cast<int>(arm.model->shape().relations) + 1;
    if (t_max >= 0 && arm_t_max != t_max) throw EvalError("ablation arms disagree on t_max");
    t_max = arm_t_max;
    const auto episodes = simulate_pairs(*arm.model, kg, log, arm.decide, pairs, arm.config, seed);
    out.push_back({arm.name, evaluate_episodes(episodes, arm.name)});
  }
  return out;
}

}  // namespace convrec
