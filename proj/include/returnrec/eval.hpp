#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "returnrec/denoising.hpp"
#include "returnrec/ensemble.hpp"
#include "returnrec/recsys.hpp"
#include "returnrec/rng.hpp"
#include "returnrec/types.hpp"

namespace returnrec {

// 1 iff the target appears within the first k entries.
int hit_at_k(std::span<const ItemId> list, ItemId target, int k);

// Single-relevant-item NDCG: 1/log2(rank + 1) if the target's 1-based rank
// is at most k, else 0.
double ndcg_at_k(std::span<const ItemId> list, ItemId target, int k);

// Relative metric drop caused by an attack: 1 - attacked/benign.
// Undefined (nullopt) when the benign metric is 0.
std::optional<double> attack_degradation(double benign, double attacked);

// Relative recovery of attack degradation: 1 - defended/undefended,
// positive when the defense helped. Undefined when the undefended
// degradation is 0.
std::optional<double> defense_gain(double undefended_degradation,
                                   double defended_degradation);

// Random-deletion baseline: deletes `count` uniformly chosen positions.
PurifiedProfile baseline_rd(std::span<const ItemId> profile, std::size_t count,
                            Rng& rng);

// Ensemble of m random deletions fused with the same vote rule as the main
// ensemble.
RecommendationList baseline_rde(const Recommender& recommender, UserId user,
                                std::span<const ItemId> profile, int m,
                                std::size_t count, Rng& rng, int k,
                                VoteRule rule = VoteRule::borda);

// Benign-impact diagnostics between two per-user recommendation list sets:
// Jaccard similarity of the recommended-item supports, the fraction of
// recommendation slots filled by items present in both supports, and the
// Shannon entropy (bits) of each item-frequency distribution.
struct BenignImpact {
  double jaccard = 0;
  double common_ratio = 0;
  double entropy_first = 0;
  double entropy_second = 0;
};

BenignImpact benign_impact(const std::vector<RecommendationList>& first,
                           const std::vector<RecommendationList>& second);

// One report line: metrics for one (condition, method, cutoff).
struct ReportRow {
  std::string condition;  // benign | attacked | defended
  std::string method;     // none | return | return_rop | ... | rd | rde
  int k = 0;
  double hit = 0;
  double ndcg = 0;
  std::optional<double> a_hit;
  std::optional<double> a_ndcg;
  std::optional<double> d_hit;
  std::optional<double> d_ndcg;
};

// Report CSV, bit-exact: fixed header, %.6f floats, empty cells for
// undefined values, rows sorted by (condition, method, k).
std::string format_report_csv(std::vector<ReportRow> rows);
std::vector<ReportRow> parse_report_csv(std::string_view text);

}  // namespace returnrec
