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

#include "convrec/config.hpp"

#include <fstream>
#include <set>

namespace convrec {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object())
      throw ConfigError("config section '" + (prefix_.empty() ? "<root>" : prefix_) +
                        "' must be an object");
  }

  template <class T>
  void opt(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + path(key) + "' has the wrong type");
    }
  }

  template <class T>
  void req(const std::string& key, T& out) {
    if (!obj_.contains(key)) throw ConfigError("missing config key '" + path(key) + "'");
    opt(key, out);
  }

  template <class Enum, class Parse>
  void opt_enum(const std::string& key, Enum& out, Parse parse) {
    std::string s;
    opt(key, s);
    if (s.empty()) return;
    try {
      out = parse(s);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + path(key) + "' has unknown value '" + s + "'");
    }
  }

  Reader sub(const std::string& key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    return Reader(obj_.contains(key) ? obj_.at(key) : kEmpty, path(key));
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  void finish() const {
    for (const auto& item : obj_.items())
      if (!seen_.contains(item.key()))
        throw ConfigError("unknown config key '" + path(item.key()) + "'");
  }

 private:
  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void read_data(Reader r, DataConfig& d) {
  r.req("source", d.source);
  if (d.source != "files" && d.source != "synthetic")
    throw ConfigError("config key 'data.source' must be \"files\" or \"synthetic\"");
  if (d.source == "files") {
    r.req("triples", d.triples);
    r.req("interactions", d.interactions);
  } else {
    r.opt("triples", d.triples);
    r.opt("interactions", d.interactions);
  }
  r.opt("relation_blocklist", d.relation_blocklist);
  r.opt("templates", d.templates);
  r.opt("aliases", d.aliases);
  r.opt("domain", d.domain);
  r.opt("rating_threshold", d.rating_threshold);
  {
    auto s = r.sub("split");
    s.opt("min_interactions", d.split.min_interactions);
    s.opt("negative_ratio", d.split.negative_ratio);
    s.opt("train_fraction", d.split.train_fraction);
    s.opt("validation_fraction", d.split.validation_fraction);
    s.opt("seed", d.split.seed);
    s.finish();
  }
  {
    auto s = r.sub("synthetic");
    s.opt("items", d.synthetic.items);
    s.opt("relations", d.synthetic.relations);
    s.opt("values_per_relation", d.synthetic.values_per_relation);
    s.opt("users", d.synthetic.users);
    s.opt("positives_per_user", d.synthetic.positives_per_user);
    s.opt("seed", d.synthetic.seed);
    s.finish();
  }
  r.finish();
}

void read_embedding(Reader r, TrainConfig& t) {
  r.opt("lambda", t.lambda);
  r.opt("batch_size", t.batch_size);
  r.opt("lr_rec", t.lr_rec);
  r.opt("lr_kg", t.lr_kg);
  r.opt("l2_rec", t.l2_rec);
  r.opt("margin", t.margin);
  r.opt("epochs", t.epochs);
  r.opt("dim", t.dim);
  r.opt("attention_dim", t.attention_dim);
  r.opt_enum("attention_mode", t.attention_mode, parse_attention_mode);
  r.opt("belief_max_entities", t.belief_max_entities);
  r.opt("belief_empty_prob", t.belief_empty_prob);
  r.opt("resample_negatives", t.resample_negatives);
  r.finish();
}

void read_policy(Reader r, PolicyTrainConfig& p) {
  r.opt("episodes", p.episodes);
  r.opt("updates_per_episode", p.updates_per_episode);
  r.opt("batch_size", p.dqn.batch_size);
  r.opt("replay_capacity", p.dqn.replay_capacity);
  r.opt("hidden", p.dqn.hidden);
  r.opt("learning_rate", p.dqn.learning_rate);
  r.opt("rms_decay", p.dqn.rms_decay);
  r.opt("rms_eps", p.dqn.rms_eps);
  r.opt("target_sync_every", p.dqn.target_sync_every);
  r.opt("epsilon_start", p.dqn.epsilon_start);
  r.opt("epsilon_end", p.dqn.epsilon_end);
  r.opt("anneal_fraction", p.dqn.anneal_fraction);
  r.finish();
}

void read_conversation(Reader r, ConversationConfig& c) {
  r.opt("top_k", c.top_k);
  r.opt("threshold", c.threshold);
  r.opt("t_max", c.t_max);
  r.opt_enum("question_selection", c.selection, parse_question_selection);
  r.finish();
}

void read_rewards(Reader r, RewardConfig& w) {
  r.opt("r_tp", w.r_tp);
  r.opt("r_tn", w.r_tn);
  r.opt("r_ta", w.r_ta);
  r.opt("r_tm", w.r_tm);
  r.opt("eta", w.eta);
  r.finish();
}

}  // namespace

AppConfig parse_config(const json& j) {
  AppConfig cfg;
  Reader root(j, "");
  read_data(root.sub("data"), cfg.data);
  read_embedding(root.sub("embedding"), cfg.embedding);
  read_policy(root.sub("policy"), cfg.policy);
  read_conversation(root.sub("conversation"), cfg.conversation);
  read_rewards(root.sub("rewards"), cfg.conversation.rewards);
  {
    auto s = root.sub("seeds");
    s.opt("embedding", cfg.seeds.embedding);
    s.opt("policy", cfg.seeds.policy);
    s.opt("simulation", cfg.seeds.simulation);
    s.finish();
  }
  {
    auto s = root.sub("service");
    s.opt("host", cfg.service.host);
    s.opt("port", cfg.service.port);
    s.opt("session_timeout_seconds", cfg.service.session_timeout_seconds);
    s.finish();
  }
  root.req("output_dir", cfg.output_dir);
  root.finish();

  cfg.conversation.t_max = cfg.conversation.t_max < 0 ? 0 : cfg.conversation.t_max;
  cfg.embedding.seed = cfg.seeds.embedding;
  try {
    cfg.embedding.validate();
    cfg.policy.dqn.validate();
    cfg.conversation.rewards.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (cfg.conversation.top_k == 0) throw ConfigError("config key 'conversation.top_k' must be >= 1");
  if (cfg.service.session_timeout_seconds <= 0)
    throw ConfigError("config key 'service.session_timeout_seconds' must be positive");
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json config_json(const AppConfig& c) {
  const auto& d = c.data;
  const auto& t = c.embedding;
  const auto& p = c.policy;
  const auto& v = c.conversation;
  return {
      {"data",
       {{"source", d.source},
        {"triples", d.triples},
        {"interactions", d.interactions},
        {"relation_blocklist", d.relation_blocklist},
        {"templates", d.templates},
        {"aliases", d.aliases},
        {"domain", d.domain},
        {"rating_threshold", d.rating_threshold},
        {"split",
         {{"min_interactions", d.split.min_interactions},
          {"negative_ratio", d.split.negative_ratio},
          {"train_fraction", d.split.train_fraction},
          {"validation_fraction", d.split.validation_fraction},
          {"seed", d.split.seed}}},
        {"synthetic",
         {{"items", d.synthetic.items},
          {"relations", d.synthetic.relations},
          {"values_per_relation", d.synthetic.values_per_relation},
          {"users", d.synthetic.users},
          {"positives_per_user", d.synthetic.positives_per_user},
          {"seed", d.synthetic.seed}}}}},
      {"embedding",
       {{"lambda", t.lambda},
        {"batch_size", t.batch_size},
        {"lr_rec", t.lr_rec},
        {"lr_kg", t.lr_kg},
        {"l2_rec", t.l2_rec},
        {"margin", t.margin},
        {"epochs", t.epochs},
        {"dim", t.dim},
        {"attention_dim", t.attention_dim},
        {"attention_mode", to_string(t.attention_mode)},
        {"belief_max_entities", t.belief_max_entities},
        {"belief_empty_prob", t.belief_empty_prob},
        {"resample_negatives", t.resample_negatives}}},
      {"policy",
       {{"episodes", p.episodes},
        {"updates_per_episode", p.updates_per_episode},
        {"batch_size", p.dqn.batch_size},
        {"replay_capacity", p.dqn.replay_capacity},
        {"hidden", p.dqn.hidden},
        {"learning_rate", p.dqn.learning_rate},
        {"rms_decay", p.dqn.rms_decay},
        {"rms_eps", p.dqn.rms_eps},
        {"target_sync_every", p.dqn.target_sync_every},
        {"epsilon_start", p.dqn.epsilon_start},
        {"epsilon_end", p.dqn.epsilon_end},
        {"anneal_fraction", p.dqn.anneal_fraction}}},
      {"conversation",
       {{"top_k", v.top_k},
        {"threshold", v.threshold},
        {"t_max", v.t_max},
        {"question_selection", to_string(v.selection)}}},
      {"rewards",
       {{"r_tp", v.rewards.r_tp},
        {"r_tn", v.rewards.r_tn},
        {"r_ta", v.rewards.r_ta},
        {"r_tm", v.rewards.r_tm},
        {"eta", v.rewards.eta}}},
      {"seeds",
       {{"embedding", c.seeds.embedding},
        {"policy", c.seeds.policy},
        {"simulation", c.seeds.simulation}}},
      {"service",
       {{"host", c.service.host},
        {"port", c.service.port},
        {"session_timeout_seconds", c.service.session_timeout_seconds}}},
      {"output_dir", c.output_dir},
  };
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty segment");
    if (!node->is_object()) throw ConfigError("override key '" + key + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

}  // namespace convrec
