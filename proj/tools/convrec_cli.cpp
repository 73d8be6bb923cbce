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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convrec/checkpoint.hpp"
#include "convrec/config.hpp"
#include "convrec/eval.hpp"
#include "convrec/pipeline.hpp"
#include "convrec/session_service.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvariant = 3;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
};

convrec::AppConfig read_config(const Common& c) {
  std::ifstream in(c.config);
  if (!in) throw convrec::ConfigError("cannot open config " + c.config);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw convrec::ConfigError("config " + c.config + " is not valid JSON");
  for (const auto& o : c.overrides) convrec::apply_override(doc, o);
  return convrec::parse_config(doc);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string epochs_csv(const std::vector<convrec::EpochReport>& epochs) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,recommendation_loss,knowledge_loss,total_loss,max_normal_deviation\n";
  for (const auto& e : epochs)
    os << e.epoch << ',' << e.recommendation_loss << ',' << e.knowledge_loss << ','
       << e.total_loss << ',' << e.max_normal_deviation << '\n';
  return os.str();
}

struct Loaded {
  convrec::Dataset data;
  convrec::EmbeddingModel model;
};

Loaded load_trained(const convrec::AppConfig& cfg) {
  auto data = convrec::load_dataset(cfg.data);
  auto ckpt = convrec::load_embedding_checkpoint(fs::path(cfg.output_dir) / "embedding.json");
  convrec::require_compatible(ckpt, data.kg, data.log);
  return {std::move(data), std::move(ckpt.model)};
}

int cmd_generate(const convrec::AppConfig& cfg, const std::string& out_dir) {
  const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) / "data" : fs::path(out_dir);
  const auto s = convrec::make_synthetic(cfg.data.synthetic);
  convrec::write_synthetic(s, dir);
  std::cout << "wrote " << (dir / "triples.tsv").string() << " and "
            << (dir / "interactions.tsv").string() << '\n';
  return 0;
}

int cmd_train_embed(const convrec::AppConfig& cfg) {
  const auto data = convrec::load_dataset(cfg.data);
  const auto run = convrec::train_embedding(data, cfg.embedding, [](const convrec::EpochReport& e) {
    std::cerr << "epoch " << e.epoch << " loss " << e.total_loss << '\n';
  });
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  convrec::save_embedding_checkpoint(out / "embedding.json", run.model, data.kg, data.log,
                                     cfg.embedding.lambda, cfg.embedding.seed);
  write_text(out / "epochs.csv", epochs_csv(run.epochs));
  return 0;
}

int cmd_train_policy(const convrec::AppConfig& cfg) {
  const auto t = load_trained(cfg);
  const auto run =
      convrec::train_policy(t.model, t.data, cfg.conversation, cfg.policy, cfg.seeds.policy);
  const fs::path out(cfg.output_dir);
  convrec::save_policy_checkpoint(out / "policy.json", run.net,
                                  {{"episodes", cfg.policy.episodes}, {"seed", cfg.seeds.policy}});
  write_text(out / "policy_log.csv", convrec::policy_log_csv(run));
  const auto [first, last] = convrec::return_ends(run);
  std::cout << "mean return first 10% " << first << ", last 10% " << last << '\n';
  return 0;
}

int cmd_simulate(const convrec::AppConfig& cfg, std::size_t episodes, std::uint64_t seed) {
  const auto t = load_trained(cfg);
  const fs::path out(cfg.output_dir);
  const auto net = convrec::load_policy_checkpoint(out / "policy.json");

  std::vector<convrec::EvalPair> pairs;
  for (const auto& p : convrec::evaluation_pairs(t.data.log, convrec::Split::test))
    if (!t.data.kg.item_attributes(p.target).empty()) pairs.push_back(p);
  if (pairs.empty()) throw convrec::EvalError("no test positives to simulate");
  if (episodes == 0) episodes = pairs.size();
  std::vector<convrec::EvalPair> chosen;
  for (std::size_t k = 0; k < episodes; ++k) chosen.push_back(pairs[k % pairs.size()]);

  const auto eps = convrec::simulate_pairs(t.model, t.data.kg, t.data.log,
                                           convrec::greedy_decider(net), chosen, cfg.conversation,
                                           seed);
  std::string transcripts, records;
  for (const auto& e : eps) {
    transcripts += convrec::episode_jsonl(e, t.data.kg);
    records += convrec::episode_record(e, t.data.kg, t.data.log).dump() + '\n';
  }
  write_text(out / "transcripts.jsonl", transcripts);
  write_text(out / "episodes.jsonl", records);
  std::cout << "simulated " << eps.size() << " episodes\n";
  return 0;
}

int cmd_evaluate(const convrec::AppConfig& cfg, const std::string& log_path) {
  const fs::path out(cfg.output_dir);
  const fs::path path = log_path.empty() ? out / "episodes.jsonl" : fs::path(log_path);
  std::ifstream in(path);
  if (!in) throw convrec::EvalError("cannot open episode log " + path.string());
  std::vector<convrec::Episode> eps;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw convrec::EvalError("episode log line is not valid JSON");
    eps.push_back(convrec::episode_from_record(j));
  }
  const auto report = convrec::evaluate_episodes(eps, path.filename().string());
  write_text(out / "report.json", convrec::report_json(report).dump(2) + '\n');
  write_text(out / "curve.csv", convrec::curve_csv(report));
  std::cout << "SR@" << report.t_max << " " << report.sr_at.back() << ", AT " << report.at << '\n';
  const auto bad = convrec::report_violations(report);
  for (const auto& v : bad) std::cerr << "invariant violated: " << v << '\n';
  return bad.empty() ? 0 : kExitInvariant;
}

int cmd_ablate(const convrec::AppConfig& cfg) {
  const auto data = convrec::load_dataset(cfg.data);
  const auto result = convrec::run_benchmark(data, cfg);
  json table = json::array();
  std::ostringstream curves;
  curves.precision(17);
  curves << "arm,T,sr\n";
  for (const auto& arm : result.arms) {
    table.push_back({{"arm", arm.name}, {"report", convrec::report_json(arm.report)}});
    for (std::size_t k = 0; k < arm.report.sr_at.size(); ++k)
      curves << arm.name << ',' << k + 1 << ',' << arm.report.sr_at[k] << '\n';
    std::cout << arm.name << " SR@T_max " << arm.report.sr_at.back() << " AT " << arm.report.at
              << '\n';
  }
  const fs::path out(cfg.output_dir);
  write_text(out / "ablation.json", table.dump(2) + '\n');
  write_text(out / "ablation_curves.csv", curves.str());
  return 0;
}

struct ServiceBundle {
  Loaded trained;
  convrec::PolicyNet policy;
  convrec::Lexicon lexicon;
  convrec::QuestionTemplates templates;

  explicit ServiceBundle(const convrec::AppConfig& cfg)
      : trained(load_trained(cfg)),
        policy(convrec::load_policy_checkpoint(fs::path(cfg.output_dir) / "policy.json")),
        lexicon(convrec::load_lexicon(cfg.data, trained.data.kg)),
        templates(convrec::load_templates(cfg.data)) {}

  convrec::ServiceResources resources(const convrec::AppConfig& cfg) const {
    convrec::ServiceResources r;
    r.kg = &trained.data.kg;
    r.log = &trained.data.log;
    r.model = &trained.model;
    r.policy = &policy;
    r.lexicon = &lexicon;
    r.templates = &templates;
    r.conversation = cfg.conversation;
    r.idle_timeout = std::chrono::seconds(cfg.service.session_timeout_seconds);
    return r;
  }
};

int cmd_serve(const convrec::AppConfig& cfg) {
  const ServiceBundle bundle(cfg);
  convrec::SessionService service(bundle.resources(cfg), cfg.seeds.simulation);
  convrec::HttpServer server(service);
  std::cerr << "listening on " << cfg.service.host << ':' << cfg.service.port << '\n';
  server.run(cfg.service.host, cfg.service.port);
  return 0;
}

void print_message(const json& msg) {
  std::cout << "system: " << msg.at("text").get<std::string>() << '\n';
  if (msg.at("type") == "recommendation") {
    for (const auto& it : msg.at("items"))
      std::cout << "  [" << it.at("item_id") << "] " << it.at("name").get<std::string>() << "  ("
                << it.at("score") << ")\n";
    std::cout << "accept? (y/n) ";
  } else if (msg.at("type") == "question") {
    std::cout << "> ";
  }
  std::cout.flush();
}

int cmd_chat(const convrec::AppConfig& cfg, const std::string& user) {
  const ServiceBundle bundle(cfg);
  convrec::SessionService service(bundle.resources(cfg), cfg.seeds.simulation);
  auto created = service.create({{"user_id", user}});
  if (created.status != 201) {
    std::cerr << created.body.at("error").get<std::string>() << '\n';
    return kExitFailure;
  }
  const std::string id = created.body.at("session_id");
  json msg = created.body.at("message");
  print_message(msg);
  std::string line;
  while (msg.at("type") != "finished" && std::getline(std::cin, line)) {
    convrec::ServiceResponse r;
    if (msg.at("type") == "question") {
      r = service.reply(id, {{"text", line}});
    } else {
      const bool yes = !line.empty() && (line[0] == 'y' || line[0] == 'Y');
      r = service.judge(id, {{"accept", yes}});
    }
    if (r.status != 200) {
      std::cerr << r.body.at("error").get<std::string>() << '\n';
      continue;
    }
    if (r.body.contains("notice")) std::cout << "system: " << r.body.at("notice").get<std::string>() << '\n';
    msg = r.body.at("message");
    print_message(msg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-graph conversational recommender"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "JSON config file")->required();
    sub->add_option("--set", common.overrides, "Override a config key, e.g. embedding.epochs=5");
  };

  std::string gen_out;
  auto* gen = app.add_subcommand("generate-synthetic", "Write the synthetic dataset as TSV files");
  add_common(gen);
  gen->add_option("--out", gen_out, "Target directory (default <output_dir>/data)");

  auto* embed = app.add_subcommand("train-embed", "Train the knowledge and preference embeddings");
  add_common(embed);

  auto* policy = app.add_subcommand("train-policy", "Train the ask-or-recommend policy");
  add_common(policy);

  std::size_t episodes = 0;
  std::uint64_t sim_seed = 0;
  bool seed_given = false;
  auto* sim = app.add_subcommand("simulate", "Run simulated conversations on test positives");
  add_common(sim);
  sim->add_option("--episodes", episodes, "Number of episodes (default all test positives)");
  auto* seed_opt = sim->add_option("--seed", sim_seed, "Simulation seed (default seeds.simulation)");

  std::string log_path;
  auto* eval = app.add_subcommand("evaluate", "Compute SR@T and AT from an episode log");
  add_common(eval);
  eval->add_option("--episodes-log", log_path, "Episode log (default <output_dir>/episodes.jsonl)");

  auto* ablate = app.add_subcommand("ablate", "Train and compare the full model, KBQG-A and a random baseline");
  add_common(ablate);

  auto* serve = app.add_subcommand("serve", "Serve the HTTP session API");
  add_common(serve);

  std::string chat_user;
  auto* chat = app.add_subcommand("chat", "Chat in the terminal");
  add_common(chat);
  chat->add_option("--user", chat_user, "User name from the interaction log")->required();

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  try {
    const auto cfg = read_config(common);
    if (gen->parsed()) return cmd_generate(cfg, gen_out);
    if (embed->parsed()) return cmd_train_embed(cfg);
    if (policy->parsed()) return cmd_train_policy(cfg);
    if (sim->parsed()) return cmd_simulate(cfg, episodes, seed_given ? sim_seed : cfg.seeds.simulation);
    if (eval->parsed()) return cmd_evaluate(cfg, log_path);
    if (ablate->parsed()) return cmd_ablate(cfg);
    if (serve->parsed()) return cmd_serve(cfg);
    if (chat->parsed()) return cmd_chat(cfg, chat_user);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
