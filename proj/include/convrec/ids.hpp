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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace convrec {

// Dense identifier, contiguous from 0 within its namespace. The tag keeps
// entity, relation, user and item ids from being mixed up.
template <class Tag>
struct Id {
  std::int32_t value = -1;

  constexpr Id() = default;
  constexpr explicit Id(std::int32_t v) : value(v) {}
  constexpr explicit Id(std::size_t v) : value(static_cast<std::int32_t>(v)) {}

  constexpr std::size_t index() const { return static_cast<std::size_t>(value); }
  constexpr bool valid() const { return value >= 0; }

  friend constexpr auto operator<=>(Id, Id) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) {
    return os << id.value;
  }
};

struct EntityTag {};
struct RelationTag {};
struct UserTag {};
struct ItemTag {};

using EntityId = Id<EntityTag>;
using RelationId = Id<RelationTag>;
using UserId = Id<UserTag>;
// Items are KG entities; ItemId indexes the item registry, which maps each
// item onto its EntityId.
using ItemId = Id<ItemTag>;

}  // namespace convrec

template <class Tag>
struct std::hash<convrec::Id<Tag>> {
  std::size_t operator()(convrec::Id<Tag> id) const noexcept {
    return std::hash<std::int32_t>{}(id.value);
  }
};
