#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "returnrec/graph.hpp"
#include "returnrec/types.hpp"

namespace returnrec {

// Normalized co-occurrence evidence between profile positions i and j:
//   co_count(items[i], items[j], |i-j|) / row_sum(items[i], |i-j|)
// 0 when the row sum is 0 (no evidence at that hop). Not symmetric in
// (i, j): the denominator is item i's row sum. Positions are 0-based;
// i == j is an error.
double pair_score(const MultiHopGraph& graph, std::span<const ItemId> profile,
                  std::size_t i, std::size_t j);

// Occurrence probability of every profile position: A[i] is the sum of
// pair_score(i, j) over all other positions j. Low values flag items that
// the external database has never seen next to the rest of the profile;
// A[i] == 0 means no co-occurrence evidence at all.
std::vector<double> occurrence_profile(const MultiHopGraph& graph,
                                       std::span<const ItemId> profile);

}  // namespace returnrec
