#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "returnrec/graph.hpp"
#include "returnrec/types.hpp"

namespace returnrec {

enum class EditAction { deleted, replaced };

struct ProfileEdit {
  std::size_t position = 0;  // position in the original profile, 0-based
  EditAction action = EditAction::deleted;
  ItemId original = 0;
  ItemId replacement = 0;  // meaningful only when action == replaced

  bool operator==(const ProfileEdit&) const = default;
};

// An interaction sequence after purification, with one edit per selected
// target position. Untouched items keep their original relative order.
struct PurifiedProfile {
  std::vector<ItemId> items;
  std::vector<ProfileEdit> edits;
};

enum class PurifyVariant {
  full,         // delete zero-evidence targets, replace the rest
  delete_only,  // delete every target regardless of its evidence
};

// The n positions with the smallest occurrence probability, earliest
// position first on ties, returned in ascending position order.
// n > A.size() is an error.
std::vector<std::size_t> select_targets(std::span<const double> occurrence,
                                        std::size_t n);

// Best replacement for the item at `target`: the candidate maximizing the
// occurrence-weighted normalized co-occurrence with the retained profile
// items, where each retained position j contributes at hop |j - target|
// and positions listed in `targets` are excluded from the evidence.
// Candidates are items adjacent to some retained item at its hop, minus
// items already in the profile. Ties pick the smallest item id.
// Returns nullopt when no candidate exists; callers fall back to deletion.
std::optional<ItemId> choose_replacement(const MultiHopGraph& graph,
                                         std::span<const ItemId> profile,
                                         std::span<const double> occurrence,
                                         std::size_t target,
                                         std::span<const std::size_t> targets);

// Single-pass purification: selects the n least-probable positions, deletes
// those with zero occurrence probability and replaces the others (falling
// back to deletion when no replacement candidate exists). All hop distances
// use original positions. Produces exactly n edits.
PurifiedProfile purify_profile(const MultiHopGraph& graph,
                               std::span<const ItemId> profile,
                               std::span<const double> occurrence,
                               std::size_t n,
                               PurifyVariant variant = PurifyVariant::full);

}  // namespace returnrec
