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
#include <filesystem>
#include <stdexcept>
#include <string>

#include "convrec/conversation.hpp"
#include "convrec/dqn.hpp"
#include "convrec/interactions.hpp"
#include "convrec/synthetic.hpp"
#include "convrec/trainer.hpp"
#include "json.hpp"

namespace convrec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataConfig {
  std::string source;  // "files" or "synthetic"
  std::string triples;
  std::string interactions;
  std::string relation_blocklist;
  std::string templates;
  std::string aliases;
  std::string domain = "movie";
  int rating_threshold = 4;
  InteractionOptions split;
  SyntheticSpec synthetic;
};

struct PolicyTrainConfig {
  DqnConfig dqn;
  std::size_t episodes = 3000;
  std::size_t updates_per_episode = 1;
};

struct SeedConfig {
  std::uint64_t embedding = 1;
  std::uint64_t policy = 2;
  std::uint64_t simulation = 3;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  int session_timeout_seconds = 900;
};

struct AppConfig {
  DataConfig data;
  TrainConfig embedding;
  PolicyTrainConfig policy;
  ConversationConfig conversation;
  SeedConfig seeds;
  ServiceConfig service;
  std::string output_dir;
};

// Throws ConfigError naming the offending key on unknown keys, missing
// required keys or ill-typed values.
AppConfig parse_config(const nlohmann::json& j);
AppConfig load_config(const std::filesystem::path& path);

// Full config with every key, the inverse of parse_config.
nlohmann::json config_json(const AppConfig& cfg);

// Applies `dotted.key=value` to a config document. The value is parsed as
// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace convrec
