#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "returnrec/recsys.hpp"
#include "returnrec/types.hpp"

namespace returnrec {

enum class AttackKind { random, greedy };

struct AttackSpec {
  int delta = 3;             // number of inserted perturbation items
  AttackKind kind = AttackKind::random;
  int candidate_budget = 32; // greedy only: (item, position) samples per round
  std::uint64_t seed = 0;
};

// A profile with tracked insertions: erasing inserted_positions recovers
// the benign profile exactly.
struct AttackedProfile {
  std::vector<ItemId> items;
  std::vector<std::size_t> inserted_positions;  // ascending, final positions
};

// Inserts delta items drawn uniformly (without replacement) from the
// catalog minus the profile, each at a uniformly drawn position. Randomness
// is keyed by (spec.seed, user).
AttackedProfile random_attack(std::span<const ItemId> profile,
                              const AttackSpec& spec, std::uint32_t n_items,
                              UserId user);

// Greedy evasion attack: per round, evaluates candidate_budget sampled
// (item, position) insertions against the victim and keeps the one pushing
// the target furthest down the top-k (absent counts as rank k + 1, ties
// keep the first candidate evaluated). Always inserts exactly delta items.
AttackedProfile greedy_attack(std::span<const ItemId> profile,
                              const AttackSpec& spec,
                              const Recommender& victim, ItemId target, int k,
                              std::uint32_t n_items, UserId user);

}  // namespace returnrec
