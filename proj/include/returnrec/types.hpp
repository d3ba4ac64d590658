#pragma once

#include <cstdint>
#include <vector>

namespace returnrec {

using ItemId = std::uint32_t;
using UserId = std::uint64_t;
using Count = std::uint64_t;

// Ranked top-k item list as produced by any recommender. No duplicates,
// never contains items from the query profile.
using RecommendationList = std::vector<ItemId>;

}  // namespace returnrec
