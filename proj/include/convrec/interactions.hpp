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
#include <map>
#include <string>
#include <vector>

#include "convrec/ids.hpp"
#include "convrec/kg_store.hpp"

namespace convrec {

enum class Label : std::uint8_t { positive, negative };
enum class Split : std::uint8_t { train, validation, test };

const char* to_string(Split split);

struct Interaction {
  UserId user;
  ItemId item;
  Label label;
  Split split;
};

struct InteractionOptions {
  // Users and items with fewer positive interactions are removed
  // iteratively until a fixed point. 0 disables the filter.
  int min_interactions = 10;
  // Negatives per user as a multiple of that user's positive count.
  double negative_ratio = 1.0;
  double train_fraction = 0.7;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct InteractionLoadReport {
  std::size_t records = 0;
  std::size_t unknown_items = 0;
  std::size_t dropped_users = 0;
  std::size_t dropped_items = 0;
};

// Labelled (user, item) pairs with a per-user train/validation/test split.
class InteractionLog {
 public:
  InteractionLog() = default;
  InteractionLog(std::vector<std::string> user_names, std::vector<Interaction> pairs,
                 std::size_t num_items);

  std::size_t num_users() const { return user_names_.size(); }
  std::size_t num_items() const { return num_items_; }
  const std::vector<Interaction>& pairs() const { return pairs_; }
  const std::string& user_name(UserId u) const { return user_names_.at(u.index()); }
  const std::vector<std::string>& user_names() const { return user_names_; }
  std::optional<UserId> find_user(const std::string& name) const;

  // Items with the given label and split for `user`, sorted ascending.
  const std::vector<ItemId>& items(UserId user, Label label, Split split) const;
  // All positives of `user` regardless of split, sorted ascending.
  std::vector<ItemId> positives(UserId user) const;
  std::vector<Interaction> select(Label label, Split split) const;

 private:
  std::size_t bucket(UserId user, Label label, Split split) const;

  std::vector<std::string> user_names_;
  std::vector<Interaction> pairs_;
  std::size_t num_items_ = 0;
  std::vector<std::vector<ItemId>> buckets_;
  std::map<std::string, UserId> user_index_;
};

// Turns per-user positive item sets into a labelled, split log: samples
// negatives uniformly from items the user never interacted with
// (`interacted` lists every rated item, positive or not) and splits each
// user's positives and negatives 7:2:1 at random.
InteractionLog build_interaction_log(const std::vector<std::string>& user_names,
                                     const std::vector<std::vector<ItemId>>& positives,
                                     const std::vector<std::vector<ItemId>>& interacted,
                                     std::size_t num_items, const InteractionOptions& options,
                                     InteractionLoadReport* report = nullptr);

// Reads `user<TAB>item<TAB>rating` records. Ratings >= threshold are
// positives. Items that are not KG items are dropped and counted.
InteractionLog load_interactions(const std::filesystem::path& path, int rating_threshold,
                                 const KnowledgeGraph& kg, const InteractionOptions& options = {},
                                 InteractionLoadReport* report = nullptr);

}  // namespace convrec
