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
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "convrec/dialogue_state.hpp"
#include "convrec/embedding.hpp"
#include "convrec/interactions.hpp"
#include "convrec/kg_store.hpp"
#include "convrec/policy.hpp"
#include "convrec/simulator.hpp"
#include "json.hpp"

namespace convrec {

class ConversationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised by a responder that cannot produce an answer (e.g. a live user who
// went away). The episode is aborted.
class ResponderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QuestionSelection : std::uint8_t { attention, random };

const char* to_string(QuestionSelection s);
QuestionSelection parse_question_selection(const std::string& s);

struct ConversationConfig {
  std::size_t top_k = 10;
  double threshold = 0.25;  // M of the candidate signal
  int t_max = 0;            // 0 means |R| + 1
  QuestionSelection selection = QuestionSelection::attention;
  RewardConfig rewards;
};

// Highest-attention relation not yet asked; nullopt when all were asked.
std::optional<RelationId> select_question(const EmbeddingModel& model, UserId user,
                                          const std::set<RelationId>& asked);
// Uniform over unasked relations.
std::optional<RelationId> select_random_question(std::size_t relations,
                                                 const std::set<RelationId>& asked,
                                                 std::mt19937_64& rng);

// Items the system may still recommend in one conversation.
struct SessionStore {
  std::vector<ItemId> candidates;  // sorted, pool minus rejected
  std::vector<ItemId> rejected;    // in rejection order
  std::set<RelationId> asked;

  static SessionStore from_pool(std::vector<ItemId> pool);
};

void handle_rejection(SessionStore& store, std::span<const ItemId> rejected);

// Every item outside the user's training positives.
std::vector<ItemId> candidate_pool(const InteractionLog& log, UserId user, std::size_t num_items);

enum class EpisodeOutcome : std::uint8_t { success, failure, aborted };

const char* to_string(EpisodeOutcome o);

struct TurnRecord {
  int t = 0;
  Action action = Action::ask;
  std::optional<RelationId> relation;
  std::vector<ScoredItem> items;
  std::vector<EntityId> response;
  bool accepted = false;
  TurnOutcome outcome = TurnOutcome::informative_answer;
  double reward = 0.0;
  Vector state;  // s_t the decision was made on
  bool ask_allowed = true;
};

struct Episode {
  std::string session_id;
  UserId user;
  std::optional<ItemId> target;
  std::vector<TurnRecord> turns;
  EpisodeOutcome outcome = EpisodeOutcome::failure;
  int turns_used = 0;
  int t_max = 0;
};

// Decides ASK or RECOMMEND from the composed state.
using Decider = std::function<Action(const DialogueState& state, bool ask_allowed)>;

Decider greedy_decider(const PolicyNet& net);
// The net and rng must outlive the decider.
Decider epsilon_decider(const PolicyNet& net, double epsilon, std::mt19937_64& rng);
Decider fixed_decider(Action a);

struct Prompt {
  enum class Kind : std::uint8_t { question, recommendation, finished };
  Kind kind = Kind::finished;
  std::optional<RelationId> relation;
  std::vector<ScoredItem> items;
};

// One conversation as a turn-by-turn state machine. advance() opens a turn and
// returns what the system says; the caller resolves it with answer() or
// judge().
class Conversation {
 public:
  Conversation(const EmbeddingModel& model, UserId user, std::vector<ItemId> pool,
               ConversationConfig cfg, std::uint64_t seed, std::string session_id = {});

  Prompt advance(const Decider& decide);
  void answer(std::span<const EntityId> values);
  void judge(bool accepted);
  void abort();

  bool finished() const { return finished_; }
  bool awaiting_answer() const { return pending_.has_value(); }
  const Prompt* pending() const { return pending_ ? &*pending_ : nullptr; }
  int t_max() const { return t_max_; }
  int turn() const { return turn_; }

  const Episode& episode() const { return episode_; }
  Episode& episode() { return episode_; }
  const BeliefState& belief() const { return belief_; }
  const ClarifiedMask& mask() const { return mask_; }
  const SessionStore& store() const { return store_; }
  const UserView& view() const { return view_; }
  double signal() const;

  DialogueState compose() const;
  bool ask_allowed() const;

 private:
  void close_turn(TurnRecord rec, bool end, EpisodeOutcome outcome);

  const EmbeddingModel& model_;
  UserId user_;
  ConversationConfig cfg_;
  int t_max_;
  std::mt19937_64 rng_;
  UserView view_;
  BeliefState belief_;
  ClarifiedMask mask_;
  SessionStore store_;
  Episode episode_;
  int turn_ = 0;
  bool finished_ = false;
  std::optional<Prompt> pending_;
  TurnRecord open_;
};

class Responder {
 public:
  virtual ~Responder() = default;
  virtual std::vector<EntityId> answer(RelationId relation) = 0;
  virtual bool judge(std::span<const ScoredItem> items) = 0;
};

class SimulatedResponder : public Responder {
 public:
  explicit SimulatedResponder(SimulatedUser sim) : sim_(std::move(sim)) {}
  std::vector<EntityId> answer(RelationId relation) override;
  bool judge(std::span<const ScoredItem> items) override;
  const SimulatedUser& user() const { return sim_; }

 private:
  SimulatedUser sim_;
};

Episode run_episode(const EmbeddingModel& model, const Decider& decide, Responder& responder,
                    UserId user, std::vector<ItemId> pool, const ConversationConfig& cfg,
                    std::uint64_t seed, std::string session_id = {});

// One transition per turn; the last is terminal. Aborted episodes yield none.
std::vector<Transition> episode_transitions(const Episode& episode);

nlohmann::json turn_json(const TurnRecord& turn, const KnowledgeGraph& kg);
// One JSON object per turn, newline-terminated.
std::string episode_jsonl(const Episode& episode, const KnowledgeGraph& kg);

}  // namespace convrec
