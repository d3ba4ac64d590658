#include "returnrec/denoising.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace returnrec {

std::vector<std::size_t> select_targets(std::span<const double> occurrence,
                                        std::size_t n) {
  if (n > occurrence.size())
    throw std::invalid_argument("cannot select more targets than positions");
  std::vector<std::size_t> order(occurrence.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return occurrence[a] < occurrence[b];
                   });
  order.resize(n);
  std::sort(order.begin(), order.end());
  return order;
}

std::optional<ItemId> choose_replacement(const MultiHopGraph& graph,
                                         std::span<const ItemId> profile,
                                         std::span<const double> occurrence,
                                         std::size_t target,
                                         std::span<const std::size_t> targets) {
  if (profile.size() < 2) return std::nullopt;
  std::unordered_set<ItemId> present(profile.begin(), profile.end());
  std::unordered_set<std::size_t> excluded(targets.begin(), targets.end());

  // Candidate scores accumulate in ascending-j order, one term per evidence
  // position, so the floating-point sums are reproducible.
  std::unordered_map<ItemId, double> scores;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j == target || excluded.contains(j)) continue;
    const int hop = static_cast<int>(j > target ? j - target : target - j);
    const Count denom = graph.row_sum(profile[j], hop);
    if (denom == 0) continue;
    const double weight =
        occurrence[j] / static_cast<double>(denom);
    for (const auto& [candidate, count] : graph.neighbors(profile[j], hop)) {
      if (present.contains(candidate)) continue;
      scores[candidate] += weight * static_cast<double>(count);
    }
  }
  if (scores.empty()) return std::nullopt;

  ItemId best = 0;
  double best_score = -1.0;
  bool have = false;
  for (const auto& [candidate, score] : scores) {
    if (!have || score > best_score ||
        (score == best_score && candidate < best)) {
      best = candidate;
      best_score = score;
      have = true;
    }
  }
  return best;
}

PurifiedProfile purify_profile(const MultiHopGraph& graph,
                               std::span<const ItemId> profile,
                               std::span<const double> occurrence,
                               std::size_t n, PurifyVariant variant) {
  if (occurrence.size() != profile.size())
    throw std::invalid_argument("occurrence length must match the profile");
  const std::vector<std::size_t> targets = select_targets(occurrence, n);

  PurifiedProfile out;
  std::vector<std::optional<ItemId>> replacement_at(profile.size());
  std::vector<bool> is_target(profile.size(), false);
  for (std::size_t t : targets) is_target[t] = true;

  for (std::size_t t : targets) {
    ProfileEdit edit;
    edit.position = t;
    edit.original = profile[t];
    const bool try_replace =
        variant == PurifyVariant::full && occurrence[t] != 0.0;
    std::optional<ItemId> substitute;
    if (try_replace)
      substitute = choose_replacement(graph, profile, occurrence, t, targets);
    if (substitute) {
      edit.action = EditAction::replaced;
      edit.replacement = *substitute;
      replacement_at[t] = substitute;
    } else {
      edit.action = EditAction::deleted;
    }
    out.edits.push_back(edit);
  }

  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (!is_target[i]) {
      out.items.push_back(profile[i]);
    } else if (replacement_at[i]) {
      out.items.push_back(*replacement_at[i]);
    }  // deleted otherwise
  }
  return out;
}

}  // namespace returnrec
