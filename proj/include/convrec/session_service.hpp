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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "convrec/conversation.hpp"
#include "convrec/lexicon.hpp"
#include "convrec/templates.hpp"
#include "json.hpp"

namespace convrec {

// Immutable state shared by every live session.
struct ServiceResources {
  const KnowledgeGraph* kg = nullptr;
  const InteractionLog* log = nullptr;
  const EmbeddingModel* model = nullptr;
  const PolicyNet* policy = nullptr;
  const Lexicon* lexicon = nullptr;
  const QuestionTemplates* templates = nullptr;
  ConversationConfig conversation;
  std::chrono::seconds idle_timeout{900};
};

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

// The JSON session API independent of any transport. Session k (0-based, in
// creation order) runs its conversation with seed + k.
class SessionService {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  SessionService(ServiceResources res, std::uint64_t seed, Clock clock = {});

  ServiceResponse create(const nlohmann::json& body);
  ServiceResponse reply(const std::string& id, const nlohmann::json& body);
  ServiceResponse judge(const std::string& id, const nlohmann::json& body);
  ServiceResponse get(const std::string& id);

  // Routes method + path + raw body to the calls above.
  ServiceResponse handle(const std::string& method, const std::string& path,
                         const std::string& body);

  std::size_t evict_expired();
  std::size_t session_count() const;

 private:
  struct Session {
    std::mutex mu;
    std::string id;
    std::unique_ptr<Conversation> conv;
    std::chrono::steady_clock::time_point last_activity;
    nlohmann::json messages = nlohmann::json::array();
  };

  std::shared_ptr<Session> find(const std::string& id);
  nlohmann::json advance(Session& s);
  nlohmann::json summary(const Session& s) const;
  std::string new_id();

  ServiceResources res_;
  std::uint64_t seed_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t created_ = 0;
};

// Serves a SessionService over HTTP on a background thread.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // port 0 picks a free port. Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks until stop() is called from another thread or a signal.
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace convrec
