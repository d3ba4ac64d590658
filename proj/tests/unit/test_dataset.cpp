#include <doctest.h>

#include <algorithm>

#include "returnrec/dataset.hpp"
#include "returnrec/rng.hpp"

using namespace returnrec;

TEST_CASE("parse transcribes one sequence per line") {
  const auto ds = parse_interactions("7\t3,1,4\n");
  REQUIRE(ds.sequences.size() == 1);
  CHECK(ds.sequences[0].user == 7);
  CHECK(ds.sequences[0].items == std::vector<ItemId>{3, 1, 4});
}

TEST_CASE("parse rejects duplicate users instead of merging") {
  CHECK_THROWS_AS(parse_interactions("7\t3,1\n7\t2\n"), ParseError);
}

TEST_CASE("parse reports the offending line for bad tokens") {
  try {
    parse_interactions("7\t3,x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  CHECK_THROWS_AS(parse_interactions("7,3\n"), ParseError);    // missing tab
  CHECK_THROWS_AS(parse_interactions("a\t3\n"), ParseError);   // bad user
  CHECK_THROWS_AS(parse_interactions("7\t\n"), ParseError);    // empty items
}

TEST_CASE("parse skips comments and blank lines") {
  const auto ds = parse_interactions("# header\n\n1\t2,3\n\n# tail\n");
  REQUIRE(ds.sequences.size() == 1);
  CHECK(ds.sequences[0].user == 1);
}

TEST_CASE("line order is irrelevant and find works") {
  const auto ds = parse_interactions("9\t1\n2\t5,6\n");
  REQUIRE(ds.sequences.size() == 2);
  CHECK(ds.sequences[0].user == 2);  // sorted by user id
  CHECK(ds.find(9) != nullptr);
  CHECK(ds.find(9)->items == std::vector<ItemId>{1});
  CHECK(ds.find(3) == nullptr);
}

TEST_CASE("build_catalog is max id + 1") {
  CHECK(build_catalog(parse_interactions("1\t0,2\n")).n_items == 3);
  CHECK(build_catalog(parse_interactions("1\t5\n")).n_items == 6);
  CHECK_THROWS_AS(build_catalog(InteractionDataset{}), std::invalid_argument);
}

TEST_CASE("holdout_last splits off the final item") {
  const auto one = holdout_last(parse_interactions("1\t1,2,3\n"));
  REQUIRE(one.pairs.size() == 1);
  CHECK(one.pairs[0].profile == std::vector<ItemId>{1, 2});
  CHECK(one.pairs[0].target == 3);
  CHECK(one.skipped == 0);

  const auto skip = holdout_last(parse_interactions("1\t9\n"));
  CHECK(skip.pairs.empty());
  CHECK(skip.skipped == 1);

  const auto two = holdout_last(parse_interactions("1\t1,2\n2\t4,5,6\n"));
  REQUIRE(two.pairs.size() == 2);
  CHECK(two.pairs[0].target == 2);
  CHECK(two.pairs[1].target == 6);
}

TEST_CASE("holdout preserves order and shortens by exactly one") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    InteractionDataset ds;
    const std::size_t n_users = 1 + rng.bounded(5);
    for (std::size_t u = 0; u < n_users; ++u) {
      InteractionSequence seq;
      seq.user = u;
      const std::size_t len = 2 + rng.bounded(6);
      for (std::size_t i = 0; i < len; ++i)
        seq.items.push_back(static_cast<ItemId>(rng.bounded(10)));
      ds.sequences.push_back(std::move(seq));
    }
    const auto result = holdout_last(ds);
    REQUIRE(result.pairs.size() == n_users);
    for (const auto& pair : result.pairs) {
      const auto& original = ds.find(pair.user)->items;
      REQUIRE(pair.profile.size() == original.size() - 1);
      CHECK(std::equal(pair.profile.begin(), pair.profile.end(),
                       original.begin()));
      CHECK(pair.target == original.back());
    }
  }
}

TEST_CASE("format/parse round-trip is the identity") {
  Rng rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    InteractionDataset ds;
    const std::size_t n_users = 1 + rng.bounded(6);
    UserId next_user = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
      InteractionSequence seq;
      next_user += 1 + rng.bounded(50);
      seq.user = next_user;
      const std::size_t len = 1 + rng.bounded(5);
      for (std::size_t i = 0; i < len; ++i)
        seq.items.push_back(static_cast<ItemId>(rng.bounded(40)));
      ds.sequences.push_back(std::move(seq));
    }
    CHECK(parse_interactions(format_interactions(ds)) == ds);
  }
}
