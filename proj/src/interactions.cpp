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

#include "convrec/interactions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "text_util.hpp"

namespace convrec {

const char* to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "?";
}

InteractionLog::InteractionLog(std::vector<std::string> user_names,
                               std::vector<Interaction> pairs, std::size_t num_items)
    : user_names_(std::move(user_names)), pairs_(std::move(pairs)), num_items_(num_items) {
  buckets_.assign(user_names_.size() * 6, {});
  for (const auto& p : pairs_) buckets_[bucket(p.user, p.label, p.split)].push_back(p.item);
  for (auto& b : buckets_) std::sort(b.begin(), b.end());
  for (std::size_t u = 0; u < user_names_.size(); ++u) user_index_.emplace(user_names_[u], UserId(u));
}

std::size_t InteractionLog::bucket(UserId user, Label label, Split split) const {
  return user.index() * 6 + static_cast<std::size_t>(label) * 3 + static_cast<std::size_t>(split);
}

std::optional<UserId> InteractionLog::find_user(const std::string& name) const {
  auto it = user_index_.find(name);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<ItemId>& InteractionLog::items(UserId user, Label label, Split split) const {
  if (!user.valid() || user.index() >= num_users())
    throw DataError("unknown user id " + std::to_string(user.value));
  return buckets_[bucket(user, label, split)];
}

std::vector<ItemId> InteractionLog::positives(UserId user) const {
  std::vector<ItemId> out;
  for (auto s : {Split::train, Split::validation, Split::test}) {
    const auto& b = items(user, Label::positive, s);
    out.insert(out.end(), b.begin(), b.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Interaction> InteractionLog::select(Label label, Split split) const {
  std::vector<Interaction> out;
  for (const auto& p : pairs_)
    if (p.label == label && p.split == split) out.push_back(p);
  return out;
}

namespace {

void assign_splits(std::vector<ItemId> items, UserId user, Label label,
                   const InteractionOptions& options, std::mt19937_64& rng,
                   std::vector<Interaction>& out) {
  std::shuffle(items.begin(), items.end(), rng);
  const auto n = static_cast<double>(items.size());
  const double test_fraction = 1.0 - options.train_fraction - options.validation_fraction;
  const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * n));
  const auto n_val = static_cast<std::size_t>(std::lround(options.validation_fraction * n));
  for (std::size_t k = 0; k < items.size(); ++k) {
    Split split = Split::train;
    if (k < n_test) {
      split = Split::test;
    } else if (k < n_test + n_val) {
      split = Split::validation;
    }
    out.push_back({user, items[k], label, split});
  }
}

}  // namespace

InteractionLog build_interaction_log(const std::vector<std::string>& user_names,
                                     const std::vector<std::vector<ItemId>>& positives,
                                     const std::vector<std::vector<ItemId>>& interacted,
                                     std::size_t num_items, const InteractionOptions& options,
                                     InteractionLoadReport* report) {
  const std::size_t n_users = user_names.size();
  std::vector<std::set<ItemId>> pos(n_users);
  for (std::size_t u = 0; u < n_users; ++u) pos[u].insert(positives[u].begin(), positives[u].end());

  std::vector<bool> item_alive(num_items, true);
  std::vector<bool> user_alive(n_users, true);
  const auto k = static_cast<std::size_t>(std::max(options.min_interactions, 0));
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::size_t> item_count(num_items, 0);
    for (std::size_t u = 0; u < n_users; ++u) {
      if (!user_alive[u]) continue;
      for (auto i : pos[u]) ++item_count[i.index()];
    }
    for (std::size_t i = 0; i < num_items; ++i) {
      if (item_alive[i] && k > 0 && item_count[i] < k) {
        item_alive[i] = false;
        changed = true;
      }
    }
    for (std::size_t u = 0; u < n_users; ++u) {
      if (!user_alive[u]) continue;
      std::erase_if(pos[u], [&](ItemId i) { return !item_alive[i.index()]; });
      if (pos[u].empty() || pos[u].size() < k) {
        user_alive[u] = false;
        changed = true;
      }
    }
  }

  std::vector<ItemId> pool;
  for (std::size_t i = 0; i < num_items; ++i)
    if (item_alive[i]) pool.emplace_back(i);

  std::mt19937_64 rng(options.seed);
  std::vector<std::string> kept_names;
  std::vector<Interaction> pairs;
  for (std::size_t u = 0; u < n_users; ++u) {
    if (!user_alive[u]) continue;
    const UserId uid(kept_names.size());
    kept_names.push_back(user_names[u]);

    std::set<ItemId> seen(pos[u].begin(), pos[u].end());
    if (u < interacted.size()) seen.insert(interacted[u].begin(), interacted[u].end());
    std::vector<ItemId> candidates;
    for (auto i : pool)
      if (!seen.count(i)) candidates.push_back(i);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const auto want = static_cast<std::size_t>(
        std::lround(options.negative_ratio * static_cast<double>(pos[u].size())));
    candidates.resize(std::min(want, candidates.size()));

    assign_splits({pos[u].begin(), pos[u].end()}, uid, Label::positive, options, rng, pairs);
    assign_splits(std::move(candidates), uid, Label::negative, options, rng, pairs);
  }

  if (report) {
    report->dropped_users = n_users - kept_names.size();
    report->dropped_items = num_items - pool.size();
  }
  return InteractionLog(std::move(kept_names), std::move(pairs), num_items);
}

InteractionLog load_interactions(const std::filesystem::path& path, int rating_threshold,
                                 const KnowledgeGraph& kg, const InteractionOptions& options,
                                 InteractionLoadReport* report) {
  if (rating_threshold < 0) throw DataError("rating threshold must be >= 0");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open interaction file " + path.string());

  Vocabulary users;
  std::vector<std::vector<ItemId>> positives;
  std::vector<std::vector<ItemId>> interacted;
  InteractionLoadReport local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    double rating = 0.0;
    bool ok = fields.size() == 3 && !fields[0].empty() && !fields[1].empty();
    if (ok) {
      auto r = detail::trim(fields[2]);
      auto [ptr, ec] = std::from_chars(r.data(), r.data() + r.size(), rating);
      ok = ec == std::errc() && ptr == r.data() + r.size();
    }
    if (!ok) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected user<TAB>item<TAB>rating");
    }
    ++local.records;
    auto item = kg.find_item(fields[1]);
    if (!item) {
      ++local.unknown_items;
      continue;
    }
    const auto u = static_cast<std::size_t>(users.intern(fields[0]));
    if (u >= positives.size()) {
      positives.resize(u + 1);
      interacted.resize(u + 1);
    }
    interacted[u].push_back(*item);
    if (rating >= rating_threshold) positives[u].push_back(*item);
  }

  InteractionLoadReport built;
  auto log = build_interaction_log(users.names(), positives, interacted, kg.num_items(), options,
                                   &built);
  if (report) {
    *report = local;
    report->dropped_users = built.dropped_users;
    report->dropped_items = built.dropped_items;
  }
  return log;
}

}  // namespace convrec
