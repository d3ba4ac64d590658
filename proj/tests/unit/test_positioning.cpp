#include <doctest.h>

#include <cmath>

#include "returnrec/positioning.hpp"
#include "returnrec/rng.hpp"

using namespace returnrec;

namespace {

InteractionDataset make_dataset(
    const std::vector<std::vector<ItemId>>& sequences) {
  InteractionDataset ds;
  for (std::size_t u = 0; u < sequences.size(); ++u)
    ds.sequences.push_back({static_cast<UserId>(u + 1), sequences[u]});
  return ds;
}

// Shared context: external database {[1,2,3],[1,2,4]}, catalog sized to
// admit item 5 which the database never saw.
MultiHopGraph context_graph() {
  return MultiHopGraph::build(make_dataset({{1, 2, 3}, {1, 2, 4}}), 2, 6);
}

// Occurrence probabilities recomputed straight from the raw sequences,
// bypassing the graph structure entirely.
std::vector<double> brute_force_occurrence(const InteractionDataset& db,
                                           std::uint32_t n_items, int max_hop,
                                           const std::vector<ItemId>& profile) {
  auto raw_count = [&](ItemId a, ItemId b, int gap) {
    Count count = 0;
    for (const auto& seq : db.sequences) {
      if (gap > max_hop) continue;
      for (std::size_t p = 0; p + gap < seq.items.size(); ++p) {
        const ItemId x = seq.items[p];
        const ItemId y = seq.items[p + gap];
        if ((x == a && y == b) || (x == b && y == a)) ++count;
      }
    }
    return count;
  };
  std::vector<double> occurrence(profile.size(), 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < profile.size(); ++j) {
      if (i == j) continue;
      const int gap = static_cast<int>(i > j ? i - j : j - i);
      Count denom = 0;
      for (ItemId z = 0; z < n_items; ++z)
        denom += raw_count(profile[i], z, gap);
      if (denom == 0) continue;
      sum += static_cast<double>(raw_count(profile[i], profile[j], gap)) /
             static_cast<double>(denom);
    }
    occurrence[i] = sum;
  }
  return occurrence;
}

}  // namespace

TEST_CASE("pair_score follows the normalized co-occurrence") {
  const auto g = context_graph();
  const std::vector<ItemId> profile{1, 2, 5};
  CHECK(pair_score(g, profile, 0, 1) == doctest::Approx(1.0));
  CHECK(pair_score(g, profile, 1, 0) == doctest::Approx(0.5));
  CHECK(pair_score(g, profile, 2, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(pair_score(g, profile, 1, 1), std::invalid_argument);
}

TEST_CASE("occurrence profile sums pair scores per position") {
  const auto g = context_graph();
  const auto occurrence = occurrence_profile(g, std::vector<ItemId>{1, 2, 5});
  REQUIRE(occurrence.size() == 3);
  CHECK(occurrence[0] == doctest::Approx(1.0));
  CHECK(occurrence[1] == doctest::Approx(0.5));
  CHECK(occurrence[2] == doctest::Approx(0.0));
}

TEST_CASE("degenerate profiles") {
  const auto g = context_graph();
  CHECK(occurrence_profile(g, std::vector<ItemId>{5}) ==
        std::vector<double>{0.0});
  // Items the database never saw produce all-zero evidence.
  const auto zeros = occurrence_profile(g, std::vector<ItemId>{5, 5, 5});
  for (double a : zeros) CHECK(a == 0.0);
}

TEST_CASE("row normalization sums to one where defined") {
  const auto g = context_graph();
  for (ItemId a = 0; a < g.n_items(); ++a) {
    for (int hop = 1; hop <= g.max_hop(); ++hop) {
      const Count row = g.row_sum(a, hop);
      if (row == 0) continue;
      Count total = 0;
      double normalized = 0.0;
      for (ItemId z = 0; z < g.n_items(); ++z) {
        total += g.co_count(a, z, hop);
        normalized += static_cast<double>(g.co_count(a, z, hop)) /
                      static_cast<double>(row);
      }
      CHECK(total == row);
      CHECK(normalized == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("an item with no co-occurrence evidence scores exactly zero") {
  const auto g = context_graph();
  const std::vector<ItemId> profile{1, 2, 3, 5};
  const auto occurrence = occurrence_profile(g, profile);
  CHECK(occurrence[3] == 0.0);  // item 5 never co-occurs with anything
}

TEST_CASE("added evidence never decreases the pair count") {
  auto base = make_dataset({{1, 2, 3}});
  const auto g0 = MultiHopGraph::build(base, 2, 6);
  base.sequences.push_back({9, {1, 2}});
  const auto g1 = MultiHopGraph::build(base, 2, 6);
  CHECK(g1.co_count(1, 2, 1) >= g0.co_count(1, 2, 1));
  CHECK(g1.co_count(1, 2, 1) == g0.co_count(1, 2, 1) + 1);
}

TEST_CASE("occurrence matches the raw-sequence recomputation") {
  Rng rng(777);
  for (int trial = 0; trial < 200; ++trial) {
    InteractionDataset ds;
    const std::size_t n_users = 1 + rng.bounded(6);
    for (std::size_t u = 0; u < n_users; ++u) {
      InteractionSequence seq;
      seq.user = u;
      const std::size_t len = 1 + rng.bounded(5);
      for (std::size_t i = 0; i < len; ++i)
        seq.items.push_back(static_cast<ItemId>(rng.bounded(8)));
      ds.sequences.push_back(std::move(seq));
    }
    const int max_hop = 1 + static_cast<int>(rng.bounded(4));
    const auto g = MultiHopGraph::build(ds, max_hop, 8);

    std::vector<ItemId> profile;
    const std::size_t plen = 1 + rng.bounded(5);
    for (std::size_t i = 0; i < plen; ++i)
      profile.push_back(static_cast<ItemId>(rng.bounded(8)));

    const auto fast = occurrence_profile(g, profile);
    const auto slow = brute_force_occurrence(ds, 8, max_hop, profile);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i)
      CHECK(std::abs(fast[i] - slow[i]) <= 1e-12);
  }
}
