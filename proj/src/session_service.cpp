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

#include "convrec/session_service.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <regex>

#include "httplib.h"

namespace convrec {

namespace {

using nlohmann::json;

ServiceResponse error(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

}  // namespace

SessionService::SessionService(ServiceResources res, std::uint64_t seed, Clock clock)
    : res_(std::move(res)), seed_(seed), clock_(std::move(clock)) {
  if (!res_.kg || !res_.log || !res_.model || !res_.policy || !res_.lexicon || !res_.templates)
    throw std::invalid_argument("session service needs every shared resource");
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
}

std::string SessionService::new_id() {
  std::random_device rd;
  char buf[33];
  std::uint64_t hi = (std::uint64_t{rd()} << 32) | rd();
  std::uint64_t lo = (std::uint64_t{rd()} << 32) | rd();
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

std::size_t SessionService::evict_expired() {
  const auto now = clock_();
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    bool idle;
    {
      std::lock_guard slock(it->second->mu);
      idle = now - it->second->last_activity > res_.idle_timeout;
    }
    if (idle) {
      it = sessions_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  return n;
}

std::size_t SessionService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) {
  evict_expired();
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

json SessionService::advance(Session& s) {
  const auto& kg = *res_.kg;
  const Prompt p = s.conv->advance(greedy_decider(*res_.policy));
  json msg;
  if (p.kind == Prompt::Kind::question) {
    const auto& name = kg.relation_name(*p.relation);
    msg = {{"type", "question"}, {"relation", name}, {"text", res_.templates->render(name)}};
  } else if (p.kind == Prompt::Kind::recommendation) {
    json items = json::array();
    for (const auto& it : p.items)
      items.push_back({{"item_id", it.item.value}, {"name", kg.item_name(it.item)}, {"score", it.score}});
    msg = {{"type", "recommendation"},
           {"items", items},
           {"text", "Here are some " + res_.templates->domain() + " recommendations for you."}};
  } else {
    const auto& ep = s.conv->episode();
    const bool ok = ep.outcome == EpisodeOutcome::success;
    msg = {{"type", "finished"},
           {"outcome", to_string(ep.outcome)},
           {"turns_used", ep.turns_used},
           {"text", ok ? "Glad I could help." : "Sorry, I could not find what you are looking for."}};
  }
  s.messages.push_back({{"role", "system"}, {"message", msg}});
  return msg;
}

json SessionService::summary(const Session& s) const {
  const auto& kg = *res_.kg;
  const auto& c = *s.conv;
  json state = state_summary(c.belief(), c.mask(), c.finished() ? 0.0 : c.signal(), c.turn());
  json names = json::array();
  for (auto e : c.belief().affirmed) names.push_back(kg.entity_name(e));
  state["affirmed_names"] = names;
  json attention = json::array();
  for (Eigen::Index r = 0; r < c.view().alpha.size(); ++r)
    attention.push_back({{"relation", kg.relation_name(RelationId(static_cast<int32_t>(r)))},
                         {"alpha", c.view().alpha[r]}});
  state["attention"] = attention;
  json asked = json::array();
  for (auto r : c.store().asked) asked.push_back(kg.relation_name(r));
  state["asked"] = asked;
  json rejected = json::array();
  for (auto i : c.store().rejected) rejected.push_back(i.value);
  state["rejected"] = rejected;
  state["candidates"] = c.store().candidates.size();
  state["finished"] = c.finished();
  return state;
}

ServiceResponse SessionService::create(const json& body) {
  evict_expired();
  if (!body.is_object() || !body.contains("user_id")) return error(400, "body needs user_id");
  std::optional<UserId> user;
  const auto& uid = body.at("user_id");
  if (uid.is_string()) {
    user = res_.log->find_user(uid.get<std::string>());
  } else if (uid.is_number_integer()) {
    const auto v = uid.get<long long>();
    if (v >= 0 && static_cast<std::size_t>(v) < res_.log->num_users())
      user = UserId(static_cast<int32_t>(v));
  } else {
    return error(400, "user_id must be a string or integer");
  }
  if (!user) return error(404, "unknown user");

  auto s = std::make_shared<Session>();
  s->id = new_id();
  std::uint64_t k;
  {
    std::lock_guard lock(mu_);
    k = created_++;
  }
  s->conv = std::make_unique<Conversation>(
      *res_.model, *user, candidate_pool(*res_.log, *user, res_.kg->num_items()),
      res_.conversation, seed_ + k, s->id);
  s->last_activity = clock_();
  std::lock_guard slock(s->mu);
  const json msg = advance(*s);
  {
    std::lock_guard lock(mu_);
    sessions_[s->id] = s;
  }
  return {201, {{"session_id", s->id}, {"message", msg}, {"state", summary(*s)}}};
}

ServiceResponse SessionService::reply(const std::string& id, const json& body) {
  auto s = find(id);
  if (!s) return error(404, "unknown or expired session");
  if (!body.is_object() || !body.contains("text") || !body.at("text").is_string())
    return error(400, "body needs a text string");
  std::lock_guard slock(s->mu);
  s->last_activity = clock_();
  const Prompt* p = s->conv->pending();
  if (!p || p->kind != Prompt::Kind::question)
    return error(409, "session is not waiting for an answer");
  const std::string text = body.at("text").get<std::string>();
  const RelationId r = *p->relation;
  const auto entities = res_.lexicon->link(text, res_.kg->relation_values(r));
  s->messages.push_back({{"role", "user"}, {"text", text}});
  s->conv->answer(entities);

  json out;
  json linked = json::array();
  for (auto e : entities) linked.push_back(res_.kg->entity_name(e));
  out["linked"] = linked;
  if (entities.empty()) {
    std::string spoken = res_.kg->relation_name(r);
    std::replace(spoken.begin(), spoken.end(), '_', ' ');
    out["notice"] = "I could not match that to a known " + spoken + ", so let's move on.";
  }
  out["message"] = advance(*s);
  out["state"] = summary(*s);
  return {200, out};
}

ServiceResponse SessionService::judge(const std::string& id, const json& body) {
  auto s = find(id);
  if (!s) return error(404, "unknown or expired session");
  if (!body.is_object() || (!body.contains("accept") && !body.contains("rejected")))
    return error(400, "body needs accept or rejected");
  std::lock_guard slock(s->mu);
  s->last_activity = clock_();
  const Prompt* p = s->conv->pending();
  if (!p || p->kind != Prompt::Kind::recommendation)
    return error(409, "session has no recommendation to judge");
  bool accepted = false;
  if (body.contains("accept")) {
    if (!body.at("accept").is_boolean()) return error(400, "accept must be a boolean");
    accepted = body.at("accept").get<bool>();
  }
  if (body.contains("rejected")) {
    const auto& rej = body.at("rejected");
    if (!rej.is_array()) return error(400, "rejected must be an array of item ids");
    for (const auto& v : rej) {
      if (!v.is_number_integer()) return error(400, "rejected must be an array of item ids");
      const auto item = ItemId(v.get<int32_t>());
      if (std::none_of(p->items.begin(), p->items.end(),
                       [&](const ScoredItem& x) { return x.item == item; }))
        return error(400, "rejected item " + std::to_string(item.value) + " was not recommended");
    }
    if (accepted) return error(400, "accept and rejected are exclusive");
  }
  s->messages.push_back({{"role", "user"}, {"accept", accepted}});
  s->conv->judge(accepted);
  return {200, {{"message", advance(*s)}, {"state", summary(*s)}}};
}

ServiceResponse SessionService::get(const std::string& id) {
  auto s = find(id);
  if (!s) return error(404, "unknown or expired session");
  std::lock_guard slock(s->mu);
  s->last_activity = clock_();
  const auto& ep = s->conv->episode();
  json turns = json::array();
  for (const auto& t : ep.turns) turns.push_back(turn_json(t, *res_.kg));
  return {200,
          {{"session_id", s->id},
           {"user", res_.log->user_name(ep.user)},
           {"outcome", s->conv->finished() ? to_string(ep.outcome) : "in_progress"},
           {"turns", turns},
           {"messages", s->messages},
           {"state", summary(*s)}}};
}

ServiceResponse SessionService::handle(const std::string& method, const std::string& path,
                                       const std::string& body) {
  static const std::regex kSession(R"(^/sessions/([0-9a-f]+)(/(reply|judge))?$)");
  json parsed = json::object();
  if (method == "POST") {
    parsed = json::parse(body.empty() ? "{}" : body, nullptr, false);
    if (parsed.is_discarded()) return error(400, "malformed JSON body");
  }
  if (path == "/sessions") {
    if (method != "POST") return error(405, "use POST /sessions");
    return create(parsed);
  }
  std::smatch m;
  if (!std::regex_match(path, m, kSession)) return error(404, "no such endpoint");
  const std::string id = m[1];
  const std::string action = m[3];
  if (action.empty()) {
    if (method != "GET") return error(405, "use GET /sessions/{id}");
    return get(id);
  }
  if (method != "POST") return error(405, "use POST");
  return action == "reply" ? reply(id, parsed) : judge(id, parsed);
}

struct HttpServer::Impl {
  SessionService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(SessionService& s) : service(s) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      const auto out = service.handle(req.method, req.path, req.body);
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
    server.Get(".*", route);
    server.Post(".*", route);
    server.Put(".*", route);
    server.Patch(".*", route);
    server.Delete(".*", route);
  }
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port))
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace convrec
