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

#include "convrec/checkpoint.hpp"

#include <fstream>

namespace convrec {

namespace {

using nlohmann::json;

json net_json(const AttentionNet& net) {
  return {{"weight", matrix_json(net.weight)},
          {"bias", matrix_json(net.bias.transpose())},
          {"head", matrix_json(net.head.transpose())}};
}

Vector vector_from_json(const json& j) {
  const Matrix m = matrix_from_json(j);
  if (m.rows() != 1) throw CheckpointError("expected a row vector in checkpoint");
  return m.row(0).transpose();
}

AttentionNet net_from_json(const json& j) {
  return {matrix_from_json(j.at("weight")), vector_from_json(j.at("bias")),
          vector_from_json(j.at("head"))};
}

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw CheckpointError("failed writing " + path.string());
}

json read_json(const std::filesystem::path& path, const char* kind) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
  if (j.value("kind", "") != kind)
    throw CheckpointError(path.string() + " is not a " + kind + " checkpoint");
  const int version = j.value("format_version", -1);
  if (version != kCheckpointVersion)
    throw CheckpointError(path.string() + ": checkpoint version " + std::to_string(version) +
                          ", this build reads version " + std::to_string(kCheckpointVersion));
  return j;
}

}  // namespace

json matrix_json(const Matrix& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw CheckpointError("tensor shape does not match its data");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

void save_embedding_checkpoint(const std::filesystem::path& path, const EmbeddingModel& model,
                               const KnowledgeGraph& kg, const InteractionLog& log, double lambda,
                               std::uint64_t seed) {
  const auto& p = model.params();
  const auto& s = model.shape();
  std::vector<int32_t> items;
  for (auto e : model.item_entities()) items.push_back(e.value);
  json j = {
      {"kind", "embedding"},
      {"format_version", kCheckpointVersion},
      {"shape",
       {{"users", s.users}, {"entities", s.entities}, {"relations", s.relations},
        {"dim", s.dim}, {"attention_dim", s.attention_dim}}},
      {"attention_mode", to_string(model.attention_mode())},
      {"lambda", lambda},
      {"seed", seed},
      {"entity_names", kg.entity_vocabulary().names()},
      {"relation_names", kg.relation_vocabulary().names()},
      {"user_names", log.user_names()},
      {"item_entities", items},
      {"tensors",
       {{"user", matrix_json(p.user)},
        {"entity", matrix_json(p.entity)},
        {"relation", matrix_json(p.relation)},
        {"normal", matrix_json(p.normal)},
        {"translation_attention", net_json(p.translation_attention)},
        {"projection_attention", net_json(p.projection_attention)}}},
  };
  write_json(path, j);
}

EmbeddingCheckpoint load_embedding_checkpoint(const std::filesystem::path& path) {
  const json j = read_json(path, "embedding");
  try {
    const auto& sj = j.at("shape");
    ModelShape shape{sj.at("users").get<std::size_t>(), sj.at("entities").get<std::size_t>(),
                     sj.at("relations").get<std::size_t>(), sj.at("dim").get<std::size_t>(),
                     sj.at("attention_dim").get<std::size_t>()};
    std::vector<EntityId> items;
    for (auto v : j.at("item_entities").get<std::vector<int32_t>>()) items.emplace_back(v);
    const auto& t = j.at("tensors");
    EmbeddingParams params;
    params.user = matrix_from_json(t.at("user"));
    params.entity = matrix_from_json(t.at("entity"));
    params.relation = matrix_from_json(t.at("relation"));
    params.normal = matrix_from_json(t.at("normal"));
    params.translation_attention = net_from_json(t.at("translation_attention"));
    params.projection_attention = net_from_json(t.at("projection_attention"));
    EmbeddingCheckpoint out{
        EmbeddingModel(shape, std::move(items),
                       parse_attention_mode(j.at("attention_mode").get<std::string>()),
                       std::move(params)),
        j.at("entity_names").get<std::vector<std::string>>(),
        j.at("relation_names").get<std::vector<std::string>>(),
        j.at("user_names").get<std::vector<std::string>>(),
        j.at("lambda").get<double>(),
        j.at("seed").get<std::uint64_t>(),
    };
    return out;
  } catch (const json::exception& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  } catch (const ModelError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

void require_compatible(const EmbeddingCheckpoint& ckpt, const KnowledgeGraph& kg,
                        const InteractionLog& log) {
  if (ckpt.entity_names != kg.entity_vocabulary().names())
    throw CheckpointError("checkpoint entity vocabulary differs from the loaded graph");
  if (ckpt.relation_names != kg.relation_vocabulary().names())
    throw CheckpointError("checkpoint relation vocabulary differs from the loaded graph");
  if (ckpt.user_names != log.user_names())
    throw CheckpointError("checkpoint users differ from the loaded interactions");
  if (ckpt.model.item_entities() != kg.item_entities())
    throw CheckpointError("checkpoint item registry differs from the loaded graph");
}

void save_policy_checkpoint(const std::filesystem::path& path, const PolicyNet& net,
                            const nlohmann::json& meta) {
  json j = {{"kind", "policy"},
            {"format_version", kCheckpointVersion},
            {"meta", meta},
            {"w1", matrix_json(net.w1)},
            {"b1", matrix_json(net.b1.transpose())},
            {"w2", matrix_json(net.w2)},
            {"b2", matrix_json(net.b2.transpose())}};
  write_json(path, j);
}

PolicyNet load_policy_checkpoint(const std::filesystem::path& path, nlohmann::json* meta) {
  const json j = read_json(path, "policy");
  try {
    PolicyNet net;
    net.w1 = matrix_from_json(j.at("w1"));
    net.b1 = vector_from_json(j.at("b1"));
    net.w2 = matrix_from_json(j.at("w2"));
    net.b2 = vector_from_json(j.at("b2"));
    if (net.w1.rows() != 2 || net.b2.size() != 2 || net.w1.cols() != net.w2.rows() ||
        net.b1.size() != net.w2.rows())
      throw CheckpointError(path.string() + ": inconsistent policy shapes");
    if (meta) *meta = j.value("meta", json::object());
    return net;
  } catch (const json::exception& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace convrec
