#include "returnrec/attack.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "returnrec/rng.hpp"

namespace returnrec {

namespace {

// Items not currently present in the profile, ascending.
std::vector<ItemId> foreign_items(std::span<const ItemId> profile,
                                  std::uint32_t n_items) {
  std::unordered_set<ItemId> present(profile.begin(), profile.end());
  std::vector<ItemId> out;
  out.reserve(n_items - std::min<std::size_t>(present.size(), n_items));
  for (ItemId i = 0; i < n_items; ++i)
    if (!present.contains(i)) out.push_back(i);
  return out;
}

std::vector<std::size_t> flagged_positions(const std::vector<bool>& inserted) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < inserted.size(); ++i)
    if (inserted[i]) out.push_back(i);
  return out;
}

// 1-based rank of the target in the victim's top-k; k + 1 when absent.
int target_rank(const Recommender& victim, UserId user,
                std::span<const ItemId> profile, ItemId target, int k) {
  const RecommendationList list = victim.recommend(user, profile, k);
  for (std::size_t r = 0; r < list.size(); ++r)
    if (list[r] == target) return static_cast<int>(r) + 1;
  return k + 1;
}

}  // namespace

AttackedProfile random_attack(std::span<const ItemId> profile,
                              const AttackSpec& spec, std::uint32_t n_items,
                              UserId user) {
  if (spec.delta < 0) throw std::invalid_argument("delta must be >= 0");
  AttackedProfile out;
  out.items.assign(profile.begin(), profile.end());
  if (spec.delta == 0) return out;

  std::vector<ItemId> pool = foreign_items(profile, n_items);
  if (pool.size() < static_cast<std::size_t>(spec.delta))
    throw std::runtime_error("not enough catalog items to insert");

  Rng rng(derive_seed(spec.seed, stream::attack, user));
  std::vector<bool> inserted(out.items.size(), false);
  for (int d = 0; d < spec.delta; ++d) {
    // Draw without replacement so every perturbation is distinct.
    const std::size_t pick = rng.bounded(pool.size());
    const ItemId item = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));

    const std::size_t pos = rng.bounded(out.items.size() + 1);
    out.items.insert(out.items.begin() + static_cast<std::ptrdiff_t>(pos),
                     item);
    inserted.insert(inserted.begin() + static_cast<std::ptrdiff_t>(pos), true);
  }
  out.inserted_positions = flagged_positions(inserted);
  return out;
}

AttackedProfile greedy_attack(std::span<const ItemId> profile,
                              const AttackSpec& spec,
                              const Recommender& victim, ItemId target, int k,
                              std::uint32_t n_items, UserId user) {
  if (spec.delta < 0) throw std::invalid_argument("delta must be >= 0");
  if (spec.candidate_budget < 1)
    throw std::invalid_argument("candidate_budget must be >= 1");

  AttackedProfile out;
  out.items.assign(profile.begin(), profile.end());
  if (spec.delta == 0) return out;

  Rng rng(derive_seed(spec.seed, stream::attack, user));
  std::vector<bool> inserted(out.items.size(), false);
  for (int d = 0; d < spec.delta; ++d) {
    const std::vector<ItemId> pool = foreign_items(out.items, n_items);
    if (pool.empty())
      throw std::runtime_error("not enough catalog items to insert");

    // Keep the sampled insertion that pushes the target furthest down the
    // list; on a tie the first candidate evaluated wins. Taking the argmax
    // also covers the case where every candidate improves the target's
    // rank: the least-improving one is kept so exactly delta items land.
    int best_rank = -1;
    ItemId best_item = 0;
    std::size_t best_pos = 0;
    std::vector<ItemId> trial;
    for (int b = 0; b < spec.candidate_budget; ++b) {
      const ItemId item = pool[rng.bounded(pool.size())];
      const std::size_t pos = rng.bounded(out.items.size() + 1);
      trial = out.items;
      trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), item);
      const int rank = target_rank(victim, user, trial, target, k);
      if (rank > best_rank) {
        best_rank = rank;
        best_item = item;
        best_pos = pos;
      }
    }
    out.items.insert(out.items.begin() + static_cast<std::ptrdiff_t>(best_pos),
                     best_item);
    inserted.insert(inserted.begin() + static_cast<std::ptrdiff_t>(best_pos),
                    true);
  }
  out.inserted_positions = flagged_positions(inserted);
  return out;
}

}  // namespace returnrec
