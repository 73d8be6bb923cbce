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

#include "convrec/conversation.hpp"

#include <algorithm>
#include <iterator>

namespace convrec {

const char* to_string(QuestionSelection s) {
  return s == QuestionSelection::attention ? "attention" : "random";
}

QuestionSelection parse_question_selection(const std::string& s) {
  if (s == "attention") return QuestionSelection::attention;
  if (s == "random") return QuestionSelection::random;
  throw std::invalid_argument("unknown question selection '" + s + "'");
}

const char* to_string(EpisodeOutcome o) {
  switch (o) {
    case EpisodeOutcome::success:
      return "success";
    case EpisodeOutcome::failure:
      return "failure";
    case EpisodeOutcome::aborted:
      return "aborted";
  }
  return "?";
}

std::optional<RelationId> select_question(const EmbeddingModel& model, UserId user,
                                          const std::set<RelationId>& asked) {
  for (auto r : model.rank_relations(user))
    if (!asked.contains(r)) return r;
  return std::nullopt;
}

std::optional<RelationId> select_random_question(std::size_t relations,
                                                 const std::set<RelationId>& asked,
                                                 std::mt19937_64& rng) {
  std::vector<RelationId> open;
  for (std::size_t r = 0; r < relations; ++r)
    if (!asked.contains(RelationId(static_cast<int32_t>(r))))
      open.emplace_back(static_cast<int32_t>(r));
  if (open.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
  return open[pick(rng)];
}

SessionStore SessionStore::from_pool(std::vector<ItemId> pool) {
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return {std::move(pool), {}, {}};
}

void handle_rejection(SessionStore& store, std::span<const ItemId> rejected) {
  std::vector<ItemId> drop(rejected.begin(), rejected.end());
  std::sort(drop.begin(), drop.end());
  for (auto item : rejected)
    if (std::find(store.rejected.begin(), store.rejected.end(), item) == store.rejected.end())
      store.rejected.push_back(item);
  std::vector<ItemId> kept;
  std::set_difference(store.candidates.begin(), store.candidates.end(), drop.begin(), drop.end(),
                      std::back_inserter(kept));
  store.candidates = std::move(kept);
}

std::vector<ItemId> candidate_pool(const InteractionLog& log, UserId user, std::size_t num_items) {
  const auto& train = log.items(user, Label::positive, Split::train);
  std::vector<ItemId> pool;
  pool.reserve(num_items);
  for (std::size_t i = 0; i < num_items; ++i) {
    const ItemId item(static_cast<int32_t>(i));
    if (!std::binary_search(train.begin(), train.end(), item)) pool.push_back(item);
  }
  return pool;
}

Decider greedy_decider(const PolicyNet& net) {
  return [&net](const DialogueState& s, bool ask_allowed) {
    return greedy_action(net.q_values(s.s), ask_allowed);
  };
}

Decider epsilon_decider(const PolicyNet& net, double epsilon, std::mt19937_64& rng) {
  return [&net, epsilon, &rng](const DialogueState& s, bool ask_allowed) {
    return act(net, s.s, epsilon, rng, ask_allowed);
  };
}

Decider fixed_decider(Action a) {
  return [a](const DialogueState&, bool) { return a; };
}

Conversation::Conversation(const EmbeddingModel& model, UserId user, std::vector<ItemId> pool,
                           ConversationConfig cfg, std::uint64_t seed, std::string session_id)
    : model_(model),
      user_(user),
      cfg_(std::move(cfg)),
      t_max_(cfg_.t_max > 0 ? cfg_.t_max : static_cast<int>(model.shape().relations) + 1),
      rng_(seed),
      view_(model.user_view(user)),
      belief_(BeliefState::empty(model.dim())),
      mask_(ClarifiedMask::empty(model.shape().relations)),
      store_(SessionStore::from_pool(std::move(pool))) {
  if (cfg_.top_k == 0) throw ConversationError("top_k must be >= 1");
  for (auto item : store_.candidates)
    if (!item.valid() || item.index() >= model.num_items())
      throw ConversationError("candidate pool holds unknown item " + std::to_string(item.value));
  episode_.session_id = std::move(session_id);
  episode_.user = user;
  episode_.t_max = t_max_;
  if (store_.candidates.empty()) {
    finished_ = true;
    episode_.outcome = EpisodeOutcome::failure;
  }
}

double Conversation::signal() const {
  return candidate_signal(model_, view_, belief_.b, store_.candidates, cfg_.threshold);
}

DialogueState Conversation::compose() const {
  return compose_state(belief_, mask_, signal(), turn_, model_.dim(), model_.shape().relations);
}

bool Conversation::ask_allowed() const { return store_.asked.size() < model_.shape().relations; }

Prompt Conversation::advance(const Decider& decide) {
  if (finished_) return Prompt{};
  if (pending_) throw ConversationError("previous turn is still open");
  ++turn_;
  const DialogueState s = compose();
  const bool ask_ok = ask_allowed();
  Action action = decide(s, ask_ok);
  if (!ask_ok) action = Action::recommend;

  open_ = TurnRecord{};
  open_.t = turn_;
  open_.action = action;
  open_.state = s.s;
  open_.ask_allowed = ask_ok;

  Prompt p;
  if (action == Action::ask) {
    open_.relation = cfg_.selection == QuestionSelection::attention
                         ? select_question(model_, user_, store_.asked)
                         : select_random_question(model_.shape().relations, store_.asked, rng_);
    p.kind = Prompt::Kind::question;
    p.relation = open_.relation;
  } else {
    open_.items = model_.recommend_topk(user_, belief_.b, store_.candidates, cfg_.top_k);
    p.kind = Prompt::Kind::recommendation;
    p.items = open_.items;
  }
  pending_ = p;
  return p;
}

void Conversation::answer(std::span<const EntityId> values) {
  if (!pending_ || pending_->kind != Prompt::Kind::question)
    throw ConversationError("no open question to answer");
  const RelationId r = *open_.relation;
  update_belief(belief_, values, model_);
  store_.asked.insert(r);
  if (!values.empty()) mask_.set(r);
  open_.response.assign(values.begin(), values.end());
  open_.outcome =
      values.empty() ? TurnOutcome::uninformative_answer : TurnOutcome::informative_answer;
  const bool last = turn_ >= t_max_;
  if (last) open_.outcome = TurnOutcome::rejected_or_timeout;
  open_.reward = reward(open_.outcome, cfg_.rewards);
  close_turn(std::move(open_), last, EpisodeOutcome::failure);
}

void Conversation::judge(bool accepted) {
  if (!pending_ || pending_->kind != Prompt::Kind::recommendation)
    throw ConversationError("no open recommendation to judge");
  open_.accepted = accepted;
  if (accepted) {
    open_.outcome = TurnOutcome::accepted_recommendation;
    open_.reward = reward(open_.outcome, cfg_.rewards);
    close_turn(std::move(open_), true, EpisodeOutcome::success);
    return;
  }
  std::vector<ItemId> shown;
  for (const auto& s : open_.items) shown.push_back(s.item);
  handle_rejection(store_, shown);
  open_.outcome = TurnOutcome::rejected_or_timeout;
  open_.reward = reward(open_.outcome, cfg_.rewards);
  const bool last = turn_ >= t_max_ || store_.candidates.empty();
  close_turn(std::move(open_), last, EpisodeOutcome::failure);
}

void Conversation::abort() {
  pending_.reset();
  finished_ = true;
  episode_.outcome = EpisodeOutcome::aborted;
  episode_.turns_used = turn_;
}

void Conversation::close_turn(TurnRecord rec, bool end, EpisodeOutcome outcome) {
  episode_.turns.push_back(std::move(rec));
  pending_.reset();
  episode_.turns_used = turn_;
  if (end) {
    finished_ = true;
    episode_.outcome = outcome;
  }
}

std::vector<EntityId> SimulatedResponder::answer(RelationId relation) {
  return answer_question(sim_, relation);
}

bool SimulatedResponder::judge(std::span<const ScoredItem> items) {
  return judge_recommendation(sim_, items);
}

Episode run_episode(const EmbeddingModel& model, const Decider& decide, Responder& responder,
                    UserId user, std::vector<ItemId> pool, const ConversationConfig& cfg,
                    std::uint64_t seed, std::string session_id) {
  Conversation conv(model, user, std::move(pool), cfg, seed, std::move(session_id));
  try {
    while (!conv.finished()) {
      const Prompt p = conv.advance(decide);
      if (p.kind == Prompt::Kind::question) {
        conv.answer(responder.answer(*p.relation));
      } else if (p.kind == Prompt::Kind::recommendation) {
        conv.judge(responder.judge(p.items));
      }
    }
  } catch (const ResponderError&) {
    conv.abort();
  }
  if (auto* sim = dynamic_cast<SimulatedResponder*>(&responder))
    conv.episode().target = sim->user().target;
  return conv.episode();
}

std::vector<Transition> episode_transitions(const Episode& episode) {
  std::vector<Transition> out;
  if (episode.outcome == EpisodeOutcome::aborted) return out;
  const auto& turns = episode.turns;
  for (std::size_t k = 0; k < turns.size(); ++k) {
    Transition tr;
    tr.state = turns[k].state;
    tr.action = turns[k].action;
    tr.reward = turns[k].reward;
    tr.terminal = k + 1 == turns.size();
    if (!tr.terminal) {
      tr.next_state = turns[k + 1].state;
      tr.next_ask_allowed = turns[k + 1].ask_allowed;
    }
    out.push_back(std::move(tr));
  }
  return out;
}

nlohmann::json turn_json(const TurnRecord& turn, const KnowledgeGraph& kg) {
  nlohmann::json j;
  j["t"] = turn.t;
  j["action"] = to_string(turn.action);
  if (turn.action == Action::ask) {
    j["relation"] = turn.relation ? kg.relation_name(*turn.relation) : "";
    nlohmann::json resp = nlohmann::json::array();
    for (auto e : turn.response) resp.push_back(kg.entity_name(e));
    j["response"] = resp;
  } else {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& s : turn.items) items.push_back({{"item", kg.item_name(s.item)}, {"score", s.score}});
    j["items"] = items;
    j["accepted"] = turn.accepted;
  }
  j["outcome"] = to_string(turn.outcome);
  j["reward"] = turn.reward;
  return j;
}

std::string episode_jsonl(const Episode& episode, const KnowledgeGraph& kg) {
  std::string out;
  for (const auto& turn : episode.turns) {
    auto j = turn_json(turn, kg);
    j["session"] = episode.session_id;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace convrec
