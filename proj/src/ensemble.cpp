#include "returnrec/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "returnrec/positioning.hpp"

namespace returnrec {

namespace {

int round_half_up_clamped(double x, std::size_t profile_len, int clamp_min) {
  long long n = static_cast<long long>(std::floor(x + 0.5));
  const long long lo = clamp_min;
  const long long hi = static_cast<long long>(profile_len);
  n = std::max(n, lo);
  n = std::min(n, hi);
  return static_cast<int>(std::max<long long>(n, 0));
}

}  // namespace

int sample_count(Rng& rng, const EnsembleConfig& cfg, std::size_t profile_len) {
  if (profile_len < 1)
    throw std::invalid_argument("profile must not be empty");
  const double draw = rng.normal(cfg.count_mean, cfg.count_spread);
  return round_half_up_clamped(draw, profile_len, cfg.clamp_min);
}

VoteTally tally_votes(const std::vector<RecommendationList>& lists, int k,
                      VoteRule rule) {
  VoteTally tally;
  for (const auto& list : lists) {
    const std::size_t depth =
        std::min<std::size_t>(list.size(), static_cast<std::size_t>(k));
    for (std::size_t r = 0; r < depth; ++r) {
      ++tally.appearances[list[r]];
      if (rule == VoteRule::borda) {
        tally.points[list[r]] += static_cast<std::uint64_t>(k) - r;
      } else if (r == 0) {  // plurality: only the top item scores
        tally.points[list[r]] += 1;
      }
    }
  }
  return tally;
}

RecommendationList fuse_lists(const std::vector<RecommendationList>& lists,
                              int k, VoteRule rule) {
  if (lists.empty()) throw std::invalid_argument("no lists to fuse");
  const VoteTally tally = tally_votes(lists, k, rule);

  std::vector<ItemId> ranked;
  ranked.reserve(tally.appearances.size());
  for (const auto& [item, seen] : tally.appearances) ranked.push_back(item);
  auto points_of = [&](ItemId item) -> std::uint64_t {
    auto it = tally.points.find(item);
    return it == tally.points.end() ? 0 : it->second;
  };
  std::sort(ranked.begin(), ranked.end(), [&](ItemId a, ItemId b) {
    const std::uint64_t pa = points_of(a), pb = points_of(b);
    if (pa != pb) return pa > pb;
    const std::uint32_t aa = tally.appearances.at(a),
                        ab = tally.appearances.at(b);
    if (aa != ab) return aa > ab;
    return a < b;
  });
  if (ranked.size() > static_cast<std::size_t>(k))
    ranked.resize(static_cast<std::size_t>(k));
  return ranked;
}

RecommendationList borda_vote(const std::vector<RecommendationList>& lists,
                              int k) {
  return fuse_lists(lists, k, VoteRule::borda);
}

RecommendationList ensemble_recommend(const Recommender& recommender,
                                      const MultiHopGraph& graph,
                                      std::span<const ItemId> profile,
                                      const EnsembleConfig& cfg, UserId user,
                                      EnsembleTrace* trace) {
  if (cfg.m < 1) throw std::invalid_argument("ensemble size must be >= 1");
  if (profile.empty()) throw std::invalid_argument("profile must not be empty");

  const std::vector<double> occurrence = occurrence_profile(graph, profile);
  const PurifyVariant purify_variant = cfg.variant == EnsembleVariant::rr
                                           ? PurifyVariant::delete_only
                                           : PurifyVariant::full;
  const int prompts = cfg.variant == EnsembleVariant::no_ens ? 1 : cfg.m;

  std::vector<RecommendationList> lists;
  lists.reserve(static_cast<std::size_t>(prompts));
  for (int t = 0; t < prompts; ++t) {
    Rng rng(derive_seed(cfg.seed, stream::ensemble, user,
                        static_cast<std::uint64_t>(t)));
    int n;
    if (cfg.variant == EnsembleVariant::no_ens) {
      n = round_half_up_clamped(cfg.count_mean, profile.size(), cfg.clamp_min);
    } else {
      n = sample_count(rng, cfg, profile.size());
    }
    PurifiedProfile purified = purify_profile(
        graph, profile, occurrence, static_cast<std::size_t>(n),
        purify_variant);
    RecommendationList list;
    try {
      list = recommender.recommend(user, purified.items, cfg.k);
    } catch (const std::exception& e) {
      throw EnsembleQueryError(
          std::string("recommender failed on purified prompt ") +
              std::to_string(t) + ": " + e.what(),
          std::move(purified));
    }
    lists.push_back(std::move(list));
    if (trace) trace->prompts.push_back(std::move(purified));
  }
  return fuse_lists(lists, cfg.k, cfg.vote);
}

MultiHopGraph make_random_graph_like(const MultiHopGraph& graph,
                                     std::uint64_t seed) {
  const std::uint32_t n = graph.n_items();
  MultiHopGraph out(graph.max_hop(), n);
  for (int hop = 1; hop <= graph.max_hop(); ++hop) {
    std::vector<Count> counts;
    for (ItemId a = 0; a < n; ++a)
      for (const auto& [b, count] : graph.neighbors(a, hop))
        if (b >= a) counts.push_back(count);
    if (counts.empty()) continue;
    std::sort(counts.begin(), counts.end());

    Rng rng(derive_seed(seed, stream::rop, static_cast<std::uint64_t>(hop)));
    const std::size_t want = counts.size();
    const std::size_t possible =
        static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) + 1) / 2;
    std::unordered_set<std::uint64_t> used;
    std::size_t placed = 0;
    while (placed < std::min(want, possible)) {
      ItemId a = static_cast<ItemId>(rng.bounded(n));
      ItemId b = static_cast<ItemId>(rng.bounded(n));
      if (a > b) std::swap(a, b);
      const std::uint64_t key =
          (static_cast<std::uint64_t>(a) << 32) | b;
      if (!used.insert(key).second) continue;
      const Count count = counts[rng.bounded(counts.size())];
      out.add_pair(a, b, hop, count);
      ++placed;
    }
  }
  return out;
}

}  // namespace returnrec
