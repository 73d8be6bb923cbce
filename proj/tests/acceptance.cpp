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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <random>
#include <sstream>

#include "convrec/checkpoint.hpp"
#include "convrec/config.hpp"
#include "convrec/dialogue_state.hpp"
#include "convrec/pipeline.hpp"
#include "parity.hpp"
#include "scenarios.hpp"
#include "test_support.hpp"

namespace {

using namespace convrec;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

// Pinned thresholds.
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientSeconds = 30.0;
constexpr double kSumTolerance = 1e-9;
constexpr double kOrthogonalTolerance = 1e-10;
constexpr double kNormalTolerance = 1e-9;
constexpr double kInvariantSeconds = 60.0;
constexpr double kRecoveryRate = 0.90;
constexpr double kRecoverySeconds = 300.0;
constexpr double kFinalSuccessRate = 0.6;
constexpr int kEarlyTurns = 3;
constexpr double kEndToEndSeconds = 900.0;
constexpr double kReturnGain = 0.3;
constexpr long kToyMdpSteps = 2000;
constexpr std::size_t kParitySessions = 60;

struct SeedTriple {
  std::uint64_t embedding, policy, simulation;
};
constexpr SeedTriple kSeeds[] = {{1, 2, 3}, {11, 12, 13}, {21, 22, 23}};

int failures = 0;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(const std::string& name, bool pass, const std::string& detail) {
  failures += pass ? 0 : 1;
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

AppConfig benchmark_config() {
  return load_config(CONVREC_SOURCE_DIR "/configs/synthetic.json");
}

bool same_bits(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_params(const EmbeddingParams& a, const EmbeddingParams& b) {
  auto net = [](const AttentionNet& x, const AttentionNet& y) {
    return same_bits(x.weight, y.weight) && same_bits(x.bias, y.bias) && same_bits(x.head, y.head);
  };
  return same_bits(a.user, b.user) && same_bits(a.entity, b.entity) &&
         same_bits(a.relation, b.relation) && same_bits(a.normal, b.normal) &&
         net(a.translation_attention, b.translation_attention) &&
         net(a.projection_attention, b.projection_attention);
}

// ---------------------------------------------------------------------------

void gradients() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  auto take = [&](const std::string& tag, double err, std::size_t n, const std::string& w) {
    checked += n;
    if (err > worst || where.empty()) {
      worst = std::max(worst, err);
      where = tag + " " + w;
    }
  };
  for (std::uint64_t seed = 101; seed < 104; ++seed) {
    for (auto mode : {AttentionMode::attentive, AttentionMode::average}) {
      auto fx = testing_support::small_fixture(seed, mode);
      const auto bpr = fx.bpr_batch(8);
      const auto kg = fx.triple_batch(8);
      const auto a = testing_support::check_gradient(
          fx.model, [&](const EmbeddingModel& m, Gradient* g) { return bpr_loss(m, bpr, 1e-3, g); });
      take("L_f", a.max_rel_error, a.checked, a.worst);
      const auto b = testing_support::check_gradient(fx.model, [&](const EmbeddingModel& m, Gradient* g) {
        return kg_margin_loss(m, kg, 1.0, g);
      });
      take("L_g", b.max_rel_error, b.checked, b.worst);
      const auto c = testing_support::check_gradient(fx.model, [&](const EmbeddingModel& m, Gradient* g) {
        return joint_loss(m, bpr, kg, 0.5, 1e-3, 1.0, g).total;
      });
      take("L", c.max_rel_error, c.checked, c.worst);
    }
    const auto td = scenarios::check_td_gradient(seed);
    take("TD", td.max_rel_error, td.checked, td.worst);
  }
  const double secs = since(t0);
  report("gradient correctness", worst <= kGradientTolerance && secs < kGradientSeconds,
         "max relative error " + fmt(worst) + " over " + std::to_string(checked) +
             " parameters (limit " + fmt(kGradientTolerance) + "), " + fmt(secs) + " s (limit " +
             fmt(kGradientSeconds) + " s); worst " + where);
}

// ---------------------------------------------------------------------------

void invariants() {
  const auto t0 = Clock::now();
  auto cfg = benchmark_config();
  const auto data = load_dataset(cfg.data);
  cfg.embedding.epochs = 10;
  const auto run = train_embedding(data, cfg.embedding);
  const auto& model = run.model;
  std::vector<std::string> broken;

  double normal_dev = 0.0;
  for (const auto& e : run.epochs) normal_dev = std::max(normal_dev, e.max_normal_deviation);
  if (normal_dev > kNormalTolerance) broken.push_back("normal norm deviation " + fmt(normal_dev));

  double sum_dev = 0.0;
  for (std::size_t u = 0; u < data.log.num_users(); ++u) {
    const auto view = model.user_view(UserId(u));
    sum_dev = std::max({sum_dev, std::abs(view.alpha.sum() - 1.0), std::abs(view.beta.sum() - 1.0)});
  }
  if (sum_dev > kSumTolerance) broken.push_back("attention sum deviation " + fmt(sum_dev));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto d = static_cast<Eigen::Index>(model.dim());
  double ortho = 0.0;
  for (int k = 0; k < 2000; ++k) {
    Vector v(d), w(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      v[j] = unit(rng);
      w[j] = unit(rng);
    }
    w.normalize();
    ortho = std::max(ortho, std::abs(project(v, w).dot(w)));
  }
  for (std::size_t r = 0; r < model.shape().relations; ++r) {
    const Vector w = model.params().normal.row(static_cast<Eigen::Index>(r)).transpose();
    const Vector v = model.params().entity.row(static_cast<Eigen::Index>(r)).transpose();
    ortho = std::max(ortho, std::abs(project(v, w).dot(w)));
  }
  if (ortho > kOrthogonalTolerance) broken.push_back("projection not orthogonal " + fmt(ortho));

  std::uniform_int_distribution<int> ent(0, static_cast<int>(data.kg.num_entities()) - 1);
  double min_score = 0.0;
  bool first = true;
  for (std::size_t u = 0; u < data.log.num_users(); ++u) {
    std::vector<EntityId> said;
    for (int j = 0; j < static_cast<int>(u % 4); ++j) said.emplace_back(ent(rng));
    const Vector b = said.empty() ? Vector::Zero(d) : model.entity_sum(said);
    const auto view = model.user_view(UserId(u));
    for (std::size_t i = 0; i < data.kg.num_items(); ++i) {
      const double s = model.score_user_item(view, ItemId(i), b);
      min_score = first ? s : std::min(min_score, s);
      first = false;
    }
  }
  if (min_score < 0.0) broken.push_back("negative score " + fmt(min_score));

  bool monotone = true;
  for (int t_max : {2, 5, 9}) {
    const auto r = evaluate_episodes(scenarios::random_episodes(500, t_max, rng));
    for (std::size_t k = 1; k < r.sr_at.size(); ++k) monotone = monotone && r.sr_at[k] >= r.sr_at[k - 1];
  }
  const auto pairs = evaluation_pairs(data.log, Split::test);
  const auto eps = simulate_pairs(model, data.kg, data.log, fixed_decider(Action::recommend), pairs,
                                  cfg.conversation, 9);
  const auto sim = evaluate_episodes(eps);
  for (std::size_t k = 1; k < sim.sr_at.size(); ++k) monotone = monotone && sim.sr_at[k] >= sim.sr_at[k - 1];
  if (!monotone) broken.push_back("SR@T decreases");

  const double secs = since(t0);
  if (secs >= kInvariantSeconds) broken.push_back("took " + fmt(secs) + " s");
  std::string detail = "normal deviation " + fmt(normal_dev) + ", attention sum deviation " +
                       fmt(sum_dev) + ", max |P_w v . w| " + fmt(ortho) + ", min score " +
                       fmt(min_score) + ", SR@T monotone " + (monotone ? "yes" : "no") + ", " +
                       fmt(secs) + " s (limit " + fmt(kInvariantSeconds) + " s)";
  for (const auto& b : broken) detail += "; " + b;
  report("algebraic invariants", broken.empty(), detail);
}

// ---------------------------------------------------------------------------

void oracles() {
  const auto t0 = Clock::now();
  auto cfg = benchmark_config();
  const auto data = load_dataset(cfg.data);
  cfg.embedding.epochs = 3;
  const auto model = train_embedding(data, cfg.embedding).model;
  const auto d = static_cast<Eigen::Index>(model.dim());
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> ent(0, static_cast<int>(data.kg.num_entities()) - 1);
  std::bernoulli_distribution keep(0.4);

  std::size_t topk_checked = 0, topk_bad = 0, signal_checked = 0, signal_bad = 0;
  for (std::size_t u = 0; u < data.log.num_users(); ++u) {
    const UserId user(u);
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<EntityId> said;
      for (int j = 0; j < rep + static_cast<int>(u % 2); ++j) said.emplace_back(ent(rng));
      const Vector b = said.empty() ? Vector::Zero(d) : model.entity_sum(said);
      std::vector<ItemId> cands;
      for (std::size_t i = 0; i < data.kg.num_items(); ++i)
        if (rep == 0 || keep(rng)) cands.emplace_back(i);
      for (std::size_t k : {1, 10, 50, 500}) {
        ++topk_checked;
        const auto got = model.recommend_topk(user, b, cands, k);
        const auto want = scenarios::oracle_topk(model, user, b, cands, k);
        bool same = got.size() == want.size();
        for (std::size_t j = 0; same && j < got.size(); ++j)
          same = got[j].item == want[j].item && got[j].score == want[j].score;
        topk_bad += !same;
      }
      const auto view = model.user_view(user);
      for (double m : {0.0, 40.0, 52.0, 60.0, 75.0, 1e9}) {
        ++signal_checked;
        signal_bad += candidate_signal(model, view, b, cands, m) !=
                      scenarios::oracle_signal(model, user, b, cands, m);
      }
    }
  }

  std::size_t logs_bad = 0;
  std::uniform_int_distribution<int> t_pick(1, 10);
  std::uniform_int_distribution<std::size_t> n_pick(20, 200);
  for (int log = 0; log < 500; ++log) {
    const int t_max = t_pick(rng);
    const auto eps = scenarios::random_episodes(n_pick(rng), t_max, rng);
    const auto r = evaluate_episodes(eps);
    logs_bad += r.sr_at != scenarios::oracle_sr_curve(eps, t_max) ||
                r.at != scenarios::oracle_average_turn(eps);
  }

  const double secs = since(t0);
  report("oracle equivalence", topk_bad == 0 && signal_bad == 0 && logs_bad == 0,
         "recommend_topk " + std::to_string(topk_checked - topk_bad) + "/" +
             std::to_string(topk_checked) + " exact, candidate_signal " +
             std::to_string(signal_checked - signal_bad) + "/" + std::to_string(signal_checked) +
             " exact, SR@T/AT " + std::to_string(500 - logs_bad) + "/500 logs exact, " + fmt(secs) +
             " s");
}

// ---------------------------------------------------------------------------

void recovery() {
  const auto t0 = Clock::now();
  const auto cfg = benchmark_config();
  const auto data = load_dataset(cfg.data);
  const auto model = train_embedding(data, cfg.embedding).model;
  std::size_t hits = 0;
  for (std::size_t u = 0; u < data.log.num_users(); ++u) {
    hits += model.rank_relations(UserId(u)).front() == data.dominant_relation.at(u);
  }
  const double rate = static_cast<double>(hits) / static_cast<double>(data.log.num_users());
  const double secs = since(t0);
  report("synthetic preference recovery", rate >= kRecoveryRate && secs < kRecoverySeconds,
         "dominant relation ranked first for " + std::to_string(hits) + "/" +
             std::to_string(data.log.num_users()) + " users (" + fmt(100 * rate) +
             "%, limit " + fmt(100 * kRecoveryRate) + "%) after " +
             std::to_string(cfg.embedding.epochs) + " epochs, " + fmt(secs) + " s (limit " +
             fmt(kRecoverySeconds) + " s)");
}

// ---------------------------------------------------------------------------

void end_to_end_and_rl() {
  const auto t0 = Clock::now();
  const auto base = benchmark_config();
  const auto data = load_dataset(base.data);
  std::map<std::string, double> final_sr, early_sr;
  std::vector<std::pair<double, double>> returns;
  std::ostringstream per_seed;
  for (const auto& s : kSeeds) {
    auto cfg = base;
    cfg.seeds = {s.embedding, s.policy, s.simulation};
    cfg.embedding.seed = s.embedding;
    const auto result = run_benchmark(data, cfg);
    per_seed << " [seeds " << s.embedding << "/" << s.policy << "/" << s.simulation;
    for (const auto& arm : result.arms) {
      double early = 0.0;
      for (int t = 1; t <= kEarlyTurns; ++t) early += arm.report.sr_at.at(static_cast<std::size_t>(t - 1));
      final_sr[arm.name] += arm.report.sr_at.back() / std::size(kSeeds);
      early_sr[arm.name] += early / std::size(kSeeds);
      per_seed << " " << arm.name << " SR@T_max " << fmt(arm.report.sr_at.back()) << " sum SR@1.."
               << kEarlyTurns << " " << fmt(early);
    }
    per_seed << "]";
    returns.push_back(return_ends(result.full_policy));
  }
  const double secs = since(t0);
  const double full_final = final_sr.at("full");
  const double full_early = early_sr.at("full");
  const bool beats_a = full_early > early_sr.at("kbqg_a");
  const bool beats_base = full_early > early_sr.at("random_baseline");
  report("end-to-end conversational gain",
         full_final >= kFinalSuccessRate && beats_a && beats_base && secs < kEndToEndSeconds,
         "mean SR@T_max full " + fmt(full_final) + " (limit " + fmt(kFinalSuccessRate) +
             "); mean sum of SR@1.." + std::to_string(kEarlyTurns) + " full " + fmt(full_early) +
             " vs kbqg_a " + fmt(early_sr.at("kbqg_a")) + (beats_a ? " (higher)" : " (not higher)") +
             " vs random_baseline " + fmt(early_sr.at("random_baseline")) +
             (beats_base ? " (higher)" : " (not higher)") + "; " + fmt(secs) + " s (limit " +
             fmt(kEndToEndSeconds) + " s);" + per_seed.str());

  bool gain_ok = true;
  std::ostringstream gains;
  for (const auto& [first, last] : returns) {
    gain_ok = gain_ok && last - first >= kReturnGain;
    gains << " " << fmt(first) << "->" << fmt(last);
  }
  bool toy_ok = true;
  std::ostringstream toy;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = scenarios::toy_mdp(seed, kToyMdpSteps);
    const bool ok = r.optimal_at_end && r.first_optimal_step >= 0 && r.first_optimal_step <= kToyMdpSteps;
    toy_ok = toy_ok && ok;
    toy << " " << (ok ? std::to_string(r.first_optimal_step) : std::string("never"));
  }
  report("RL sanity", gain_ok && toy_ok,
         "mean return first 10% -> last 10% per seed:" + gains.str() + " (gain limit " +
             fmt(kReturnGain) + "); toy MDP first optimal step per seed:" + toy.str() +
             " (limit " + std::to_string(kToyMdpSteps) + ")");
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(CONVREC_CLI) + " " + args + " > " +
                          (dir / "cli.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism_and_parity() {
  const auto t0 = Clock::now();
  testing_support::TempDir dir;
  auto doc = config_json(benchmark_config());
  doc["output_dir"] = (dir.path() / "run").string();
  const auto cfg_path = dir.write("config.json", doc.dump(2)).string();
  const auto cfg = parse_config(doc);
  const auto out = dir.path() / "run";

  std::vector<std::string> broken;
  if (run_cli("train-embed -c " + cfg_path, dir.path()) != 0) broken.push_back("train-embed failed");
  if (run_cli("train-policy -c " + cfg_path, dir.path()) != 0) broken.push_back("train-policy failed");
  std::string first, second;
  if (broken.empty()) {
    run_cli("simulate -c " + cfg_path + " --episodes 200 --seed 7", dir.path());
    first = testing_support::read_file(out / "transcripts.jsonl");
    run_cli("simulate -c " + cfg_path + " --episodes 200 --seed 7", dir.path());
    second = testing_support::read_file(out / "transcripts.jsonl");
  }
  const bool transcripts_same = !first.empty() && first == second;
  if (!transcripts_same) broken.push_back("transcripts differ or are empty");

  bool ckpt_same = false;
  std::size_t scores = 0;
  if (broken.empty()) {
    const auto data = load_dataset(cfg.data);
    const auto a = load_embedding_checkpoint(out / "embedding.json");
    save_embedding_checkpoint(out / "resaved.json", a.model, data.kg, data.log, a.lambda, a.seed);
    const auto b = load_embedding_checkpoint(out / "resaved.json");
    const auto fresh = train_embedding(data, cfg.embedding).model;
    ckpt_same = same_params(a.model.params(), b.model.params()) &&
                same_params(a.model.params(), fresh.params()) &&
                testing_support::read_file(out / "embedding.json") ==
                    testing_support::read_file(out / "resaved.json");
    const Vector zero = Vector::Zero(static_cast<Eigen::Index>(fresh.dim()));
    for (std::size_t u = 0; u < data.log.num_users(); ++u)
      for (std::size_t i = 0; i < data.kg.num_items(); ++i) {
        const double x = fresh.score_user_item(UserId(u), ItemId(i), zero);
        const double y = b.model.score_user_item(UserId(u), ItemId(i), zero);
        ckpt_same = ckpt_same && std::memcmp(&x, &y, sizeof x) == 0;
        ++scores;
      }
    if (!ckpt_same) broken.push_back("checkpoint reload not bit-exact");
  }
  std::string detail = "simulate --episodes 200 --seed 7 twice: " +
                       std::string(transcripts_same ? "byte-identical" : "different") + " (" +
                       std::to_string(first.size()) + " bytes); checkpoint reload " +
                       (ckpt_same ? "bit-exact" : "not bit-exact") + " on tensors and " +
                       std::to_string(scores) + " scores; " + fmt(since(t0)) + " s";
  for (const auto& b : broken) detail += "; " + b;
  report("determinism", broken.empty(), detail);

  // Live parity on the artifacts just trained through the CLI.
  const auto t1 = Clock::now();
  if (!fs::exists(out / "policy.json")) {
    report("live/simulated parity", false, "no trained artifacts");
    return;
  }
  const auto data = load_dataset(cfg.data);
  const auto ckpt = load_embedding_checkpoint(out / "embedding.json");
  const auto policy = load_policy_checkpoint(out / "policy.json");
  const auto lexicon = load_lexicon(cfg.data, data.kg);
  const auto templates = load_templates(cfg.data);
  ServiceResources res;
  res.kg = &data.kg;
  res.log = &data.log;
  res.model = &ckpt.model;
  res.policy = &policy;
  res.lexicon = &lexicon;
  res.templates = &templates;
  res.conversation = cfg.conversation;
  std::size_t same = 0, sessions = 0, requests = 0, successes = 0;
  std::string first_diff;
  for (const auto& p : evaluation_pairs(data.log, Split::test)) {
    if (sessions == kParitySessions) break;
    if (data.kg.item_attributes(p.target).empty()) continue;
    ++sessions;
    const auto r = scenarios::http_parity(res, p.user, p.target, 1000 + sessions);
    same += r.identical;
    requests += r.requests;
    if (!r.identical && first_diff.empty()) first_diff = r.detail;
    SimulatedResponder resp(*start_session(p.user, p.target, data.kg));
    successes += run_episode(ckpt.model, greedy_decider(policy), resp, p.user,
                             candidate_pool(data.log, p.user, data.kg.num_items()),
                             cfg.conversation, 1000 + sessions)
                     .outcome == EpisodeOutcome::success;
  }
  report("live/simulated parity", sessions > 0 && same == sessions,
         std::to_string(same) + "/" + std::to_string(sessions) +
             " HTTP sessions identical to run_episode (state, belief, transcript and lists; " +
             std::to_string(requests) + " requests, " + std::to_string(successes) +
             " accepted), " + fmt(since(t1)) + " s" + (first_diff.empty() ? "" : "; " + first_diff));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::pair<const char*, void (*)()> blocks[] = {
      {"gradient correctness", gradients},
      {"algebraic invariants", invariants},
      {"oracle equivalence", oracles},
      {"synthetic preference recovery", recovery},
      {"end-to-end conversational gain", end_to_end_and_rl},
      {"determinism", determinism_and_parity},
  };
  for (const auto& [name, fn] : blocks) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  }
  std::cout << failures << " criteria failed, " << fmt(since(t0)) << " s total" << std::endl;
  return failures == 0 ? 0 : 1;
}
