#include "returnrec/positioning.hpp"

#include <cstdlib>
#include <stdexcept>

namespace returnrec {

double pair_score(const MultiHopGraph& graph, std::span<const ItemId> profile,
                  std::size_t i, std::size_t j) {
  if (i == j) throw std::invalid_argument("pair_score requires i != j");
  if (i >= profile.size() || j >= profile.size())
    throw std::out_of_range("profile position out of range");
  const int hop = static_cast<int>(i > j ? i - j : j - i);
  const Count denom = graph.row_sum(profile[i], hop);
  if (denom == 0) return 0.0;
  const Count num = graph.co_count(profile[i], profile[j], hop);
  return static_cast<double>(num) / static_cast<double>(denom);
}

std::vector<double> occurrence_profile(const MultiHopGraph& graph,
                                       std::span<const ItemId> profile) {
  const std::size_t len = profile.size();
  std::vector<double> occurrence(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      if (j == i) continue;
      sum += pair_score(graph, profile, i, j);
    }
    occurrence[i] = sum;
  }
  return occurrence;
}

}  // namespace returnrec
