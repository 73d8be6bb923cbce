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
#include <vector>

#include "convrec/embedding.hpp"
#include "convrec/interactions.hpp"
#include "convrec/kg_store.hpp"
#include "convrec/policy.hpp"
#include "json.hpp"

namespace convrec {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmbeddingCheckpoint {
  EmbeddingModel model;
  std::vector<std::string> entity_names;
  std::vector<std::string> relation_names;
  std::vector<std::string> user_names;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

nlohmann::json matrix_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

void save_embedding_checkpoint(const std::filesystem::path& path, const EmbeddingModel& model,
                               const KnowledgeGraph& kg, const InteractionLog& log, double lambda,
                               std::uint64_t seed);
EmbeddingCheckpoint load_embedding_checkpoint(const std::filesystem::path& path);

// Throws CheckpointError unless the checkpoint's entity, relation and user
// names match the data it is about to be used with.
void require_compatible(const EmbeddingCheckpoint& ckpt, const KnowledgeGraph& kg,
                        const InteractionLog& log);

void save_policy_checkpoint(const std::filesystem::path& path, const PolicyNet& net,
                            const nlohmann::json& meta = nlohmann::json::object());
PolicyNet load_policy_checkpoint(const std::filesystem::path& path,
                                 nlohmann::json* meta = nullptr);

}  // namespace convrec
