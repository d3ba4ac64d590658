#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "returnrec/denoising.hpp"
#include "returnrec/graph.hpp"
#include "returnrec/recsys.hpp"
#include "returnrec/rng.hpp"
#include "returnrec/types.hpp"

namespace returnrec {

enum class EnsembleVariant {
  full,    // purify + replace, m prompts
  rop,     // caller supplies a randomized graph instead of the real one
  rr,      // deletion-only purification
  no_ens,  // one prompt with a fixed purification count
};

enum class VoteRule { borda, plurality };

struct EnsembleConfig {
  int m = 10;                // number of purified prompts
  double count_mean = 3.5;   // purification-count distribution mean
  double count_spread = 0.5; // standard deviation of the same distribution
  int k = 10;                // recommendation list length
  EnsembleVariant variant = EnsembleVariant::full;
  std::uint64_t seed = 0;
  VoteRule vote = VoteRule::borda;
  int clamp_min = 1;         // lower clamp for sampled counts
};

// Draws the per-prompt purification count: Normal(count_mean, count_spread)
// rounded half-up, clamped to [clamp_min, profile_len].
int sample_count(Rng& rng, const EnsembleConfig& cfg, std::size_t profile_len);

struct VoteTally {
  std::unordered_map<ItemId, std::uint64_t> points;
  std::unordered_map<ItemId, std::uint32_t> appearances;
};

VoteTally tally_votes(const std::vector<RecommendationList>& lists, int k,
                      VoteRule rule = VoteRule::borda);

// Borda fuse: the rank-r item of each list earns k - r + 1 points; final
// order is points desc, appearances desc, item id asc, truncated to k.
RecommendationList borda_vote(const std::vector<RecommendationList>& lists,
                              int k);

RecommendationList fuse_lists(const std::vector<RecommendationList>& lists,
                              int k, VoteRule rule);

// Raised when the recommender fails on a purified prompt; carries that
// prompt so the failure is attributable to its edits.
class EnsembleQueryError : public std::runtime_error {
 public:
  EnsembleQueryError(const std::string& what, PurifiedProfile prompt)
      : std::runtime_error(what), prompt_(std::move(prompt)) {}
  const PurifiedProfile& prompt() const { return prompt_; }

 private:
  PurifiedProfile prompt_;
};

struct EnsembleTrace {
  std::vector<PurifiedProfile> prompts;
};

// Full pipeline for one profile: computes occurrence probabilities once,
// generates m independently purified prompts with randomized strength,
// queries the recommender on each, and fuses the ranked lists by voting.
// Per-prompt randomness is keyed by (cfg.seed, user, prompt index). For
// EnsembleVariant::rop the caller passes the randomized graph (see
// make_random_graph_like).
RecommendationList ensemble_recommend(const Recommender& recommender,
                                      const MultiHopGraph& graph,
                                      std::span<const ItemId> profile,
                                      const EnsembleConfig& cfg, UserId user,
                                      EnsembleTrace* trace = nullptr);

// Structure-preserving random graph: per hop, the same number of stored
// pairs, endpoints uniform over the catalog, counts drawn uniformly from
// the real graph's count multiset.
MultiHopGraph make_random_graph_like(const MultiHopGraph& graph,
                                     std::uint64_t seed);

}  // namespace returnrec
