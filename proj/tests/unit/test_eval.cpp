#include <doctest.h>

#include <cmath>

#include "returnrec/eval.hpp"

using namespace returnrec;

namespace {

class EchoRecommender : public Recommender {
 public:
  RecommendationList recommend(UserId, std::span<const ItemId> profile,
                               int) const override {
    if (profile.empty()) return {};
    return {profile.back()};
  }
};

}  // namespace

TEST_CASE("hit_at_k scans the first k entries") {
  const RecommendationList list{3, 4};
  CHECK(hit_at_k(list, 3, 1) == 1);
  CHECK(hit_at_k(list, 4, 1) == 0);
  CHECK(hit_at_k(list, 4, 2) == 1);
  CHECK(hit_at_k(RecommendationList{}, 3, 5) == 0);
}

TEST_CASE("ndcg uses the single-relevant-item closed form") {
  const RecommendationList list{3, 4, 7};
  CHECK(ndcg_at_k(list, 3, 5) == doctest::Approx(1.0));
  CHECK(ndcg_at_k(list, 4, 5) == doctest::Approx(1.0 / std::log2(3.0)));
  CHECK(ndcg_at_k(list, 4, 5) == doctest::Approx(0.6309297535714575));
  CHECK(ndcg_at_k(list, 9, 5) == 0.0);
  CHECK(ndcg_at_k(list, 7, 2) == 0.0);  // beyond the cutoff
}

TEST_CASE("hit and ndcg never decrease in k") {
  const RecommendationList list{5, 2, 8, 1};
  for (int k = 1; k < 6; ++k) {
    CHECK(hit_at_k(list, 8, k + 1) >= hit_at_k(list, 8, k));
    CHECK(ndcg_at_k(list, 8, k + 1) >= ndcg_at_k(list, 8, k));
  }
}

TEST_CASE("per-user ndcg is positive exactly when the hit fires") {
  Rng rng(909);
  for (int trial = 0; trial < 200; ++trial) {
    RecommendationList list;
    std::vector<ItemId> pool{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::size_t len = rng.bounded(8);
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t pick = rng.bounded(pool.size());
      list.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    const ItemId target = static_cast<ItemId>(rng.bounded(10));
    const int k = 1 + static_cast<int>(rng.bounded(8));
    CHECK((ndcg_at_k(list, target, k) > 0.0) ==
          (hit_at_k(list, target, k) == 1));
  }
}

TEST_CASE("attack degradation reproduces the published arithmetic") {
  // H@5 pairs from the published defense-comparison table.
  auto deg = attack_degradation(0.2116, 0.0646);
  REQUIRE(deg.has_value());
  CHECK(*deg == doctest::Approx(0.6948).epsilon(0.003));
  CHECK(*attack_degradation(0.5, 0.5) == doctest::Approx(0.0));
  CHECK_FALSE(attack_degradation(0.0, 0.1).has_value());

  auto lastfm = attack_degradation(0.0404, 0.0138);
  REQUIRE(lastfm.has_value());
  CHECK(*lastfm == doctest::Approx(0.6584).epsilon(0.002));
}

TEST_CASE("defense gain follows the table sign convention") {
  auto helped = defense_gain(0.6948, 0.3842);
  REQUIRE(helped.has_value());
  CHECK(*helped == doctest::Approx(0.4471).epsilon(0.003));
  CHECK(*defense_gain(0.6948, 0.6948) == doctest::Approx(0.0));
  auto hurt = defense_gain(0.6948, 0.9562);
  REQUIRE(hurt.has_value());
  CHECK(*hurt == doctest::Approx(-0.3761).epsilon(0.003));
  CHECK_FALSE(defense_gain(0.0, 0.5).has_value());
}

TEST_CASE("degradation and gain identities") {
  for (double b : {0.1, 0.4, 0.9}) {
    for (double x : {0.0, 0.25, 1.0}) {
      CHECK(*attack_degradation(b, b * (1.0 - x)) == doctest::Approx(x));
    }
  }
  CHECK(*defense_gain(0.5, 0.0) == doctest::Approx(1.0));  // full restoration
}

TEST_CASE("random deletion removes exactly count positions") {
  const std::vector<ItemId> profile{0, 1, 2, 3, 4, 5, 6, 7};
  Rng rng(17);
  CHECK(baseline_rd(profile, 0, rng).items == profile);
  const auto cleansed = baseline_rd(profile, 3, rng);
  CHECK(cleansed.items.size() == 5);
  CHECK(cleansed.edits.size() == 3);
  for (const auto& edit : cleansed.edits)
    CHECK(edit.action == EditAction::deleted);
  CHECK_THROWS_AS(baseline_rd(profile, 9, rng), std::invalid_argument);
}

TEST_CASE("rde with one prompt equals rd then recommend") {
  const EchoRecommender rec;
  const std::vector<ItemId> profile{4, 5, 6, 7};
  Rng rng_a(33);
  const auto cleansed = baseline_rd(profile, 2, rng_a);
  Rng rng_b(33);
  CHECK(baseline_rde(rec, 1, profile, 1, 2, rng_b, 3) ==
        rec.recommend(1, cleansed.items, 3));
}

TEST_CASE("benign impact on identical and disjoint list sets") {
  const std::vector<RecommendationList> a{{1, 2}, {3, 4}};
  const auto same = benign_impact(a, a);
  CHECK(same.jaccard == doctest::Approx(1.0));
  CHECK(same.common_ratio == doctest::Approx(1.0));
  CHECK(same.entropy_first == doctest::Approx(same.entropy_second));
  CHECK(same.entropy_first == doctest::Approx(2.0));  // uniform over 4 items

  const std::vector<RecommendationList> b{{7, 8}, {9, 10}};
  CHECK(benign_impact(a, b).jaccard == doctest::Approx(0.0));
  CHECK(benign_impact(a, b).common_ratio == doctest::Approx(0.0));

  CHECK_THROWS_AS(benign_impact({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(benign_impact(a, {{1, 2}}), std::invalid_argument);
}

TEST_CASE("report CSV is bit-exact") {
  std::vector<ReportRow> rows;
  rows.push_back({"defended", "return", 5, 0.3, 0.15, 0.4, 0.25, 0.5,
                  2.0 / 3.0});
  rows.push_back({"benign", "none", 5, 0.5, 0.2, std::nullopt, std::nullopt,
                  std::nullopt, std::nullopt});
  rows.push_back({"attacked", "none", 5, 0.1, 0.05, 0.8, 0.75, 0.0, 0.0});

  const std::string expected =
      "condition,method,k,hit,ndcg,a_hit,a_ndcg,d_hit,d_ndcg\n"
      "attacked,none,5,0.100000,0.050000,0.800000,0.750000,0.000000,0.000000\n"
      "benign,none,5,0.500000,0.200000,,,,\n"
      "defended,return,5,0.300000,0.150000,0.400000,0.250000,0.500000,"
      "0.666667\n";
  CHECK(format_report_csv(rows) == expected);

  const auto parsed = parse_report_csv(expected);
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0].condition == "attacked");
  CHECK(parsed[1].method == "none");
  CHECK_FALSE(parsed[1].a_hit.has_value());
  CHECK(parsed[2].d_ndcg.has_value());
  CHECK(*parsed[2].d_ndcg == doctest::Approx(0.666667));
  CHECK(format_report_csv(parsed) == expected);
}
