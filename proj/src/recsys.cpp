#include "returnrec/recsys.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace returnrec {

ReferenceRecommender::ReferenceRecommender(
    std::shared_ptr<const MultiHopGraph> graph, std::vector<Count> popularity)
    : graph_(std::move(graph)), popularity_(std::move(popularity)) {
  if (!graph_) throw std::invalid_argument("null graph");
  popularity_.resize(graph_->n_items(), 0);
  popularity_order_.resize(graph_->n_items());
  for (ItemId i = 0; i < graph_->n_items(); ++i) popularity_order_[i] = i;
  std::sort(popularity_order_.begin(), popularity_order_.end(),
            [&](ItemId a, ItemId b) {
              if (popularity_[a] != popularity_[b])
                return popularity_[a] > popularity_[b];
              return a < b;
            });
}

ReferenceRecommender ReferenceRecommender::train(const InteractionDataset& db,
                                                 int max_hop,
                                                 std::uint32_t n_items) {
  auto graph = std::make_shared<const MultiHopGraph>(
      MultiHopGraph::build(db, max_hop, n_items));
  std::vector<Count> popularity(graph->n_items(), 0);
  for (const auto& seq : db.sequences)
    for (ItemId item : seq.items) ++popularity[item];
  return ReferenceRecommender(std::move(graph), std::move(popularity));
}

RecommendationList ReferenceRecommender::recommend(
    UserId, std::span<const ItemId> profile, int k) const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const std::size_t len = profile.size();
  std::unordered_set<ItemId> seen(profile.begin(), profile.end());

  // The candidate sits at virtual position len + 1 (1-based), so the item
  // at 1-based position j contributes evidence at gap len + 1 - j.
  std::unordered_map<ItemId, Count> scores;
  for (std::size_t j = 0; j < len; ++j) {
    const int gap = static_cast<int>(len - j);
    for (const auto& [candidate, count] : graph_->neighbors(profile[j], gap)) {
      if (seen.contains(candidate)) continue;
      scores[candidate] += count;
    }
  }

  std::vector<ItemId> ranked;
  ranked.reserve(scores.size());
  for (const auto& [candidate, score] : scores) ranked.push_back(candidate);
  std::sort(ranked.begin(), ranked.end(), [&](ItemId a, ItemId b) {
    const Count sa = scores.at(a), sb = scores.at(b);
    if (sa != sb) return sa > sb;
    if (popularity_[a] != popularity_[b]) return popularity_[a] > popularity_[b];
    return a < b;
  });

  RecommendationList out;
  const std::size_t want = static_cast<std::size_t>(k);
  for (ItemId item : ranked) {
    if (out.size() == want) break;
    out.push_back(item);
  }
  // Popularity fallback keeps lists full-length whenever the catalog allows.
  if (out.size() < want) {
    for (ItemId item : popularity_order_) {
      if (out.size() == want) break;
      if (seen.contains(item) || scores.contains(item)) continue;
      out.push_back(item);
    }
  }
  return out;
}

}  // namespace returnrec
