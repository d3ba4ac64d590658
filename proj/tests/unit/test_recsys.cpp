#include <doctest.h>

#include <unordered_set>

#include "returnrec/recsys.hpp"
#include "returnrec/synth.hpp"

using namespace returnrec;

namespace {

InteractionDataset make_dataset(
    const std::vector<std::vector<ItemId>>& sequences) {
  InteractionDataset ds;
  for (std::size_t u = 0; u < sequences.size(); ++u)
    ds.sequences.push_back({static_cast<UserId>(u + 1), sequences[u]});
  return ds;
}

InteractionDataset training_corpus() {
  return make_dataset({{1, 2, 3}, {1, 2, 4}});
}

}  // namespace

TEST_CASE("training delegates to the shared graph builder") {
  const auto db = training_corpus();
  const auto handle = ReferenceRecommender::train(db, 2);
  CHECK(handle.graph() == MultiHopGraph::build(db, 2));
}

TEST_CASE("training twice yields identical recommenders") {
  const auto db = training_corpus();
  const auto a = ReferenceRecommender::train(db, 2);
  const auto b = ReferenceRecommender::train(db, 2);
  const std::vector<ItemId> profile{1, 2};
  CHECK(a.recommend(1, profile, 3) == b.recommend(1, profile, 3));
}

TEST_CASE("candidates score by next-position gap co-occurrence") {
  const auto handle = ReferenceRecommender::train(training_corpus(), 2);
  // s(3) = co(1,3,hop2) + co(2,3,hop1) = 2; s(4) = 2; popularity ties too,
  // so ascending id decides.
  CHECK(handle.recommend(1, std::vector<ItemId>{1, 2}, 2) ==
        RecommendationList{3, 4});
  CHECK(handle.recommend(1, std::vector<ItemId>{2}, 1) ==
        RecommendationList{1});
}

TEST_CASE("profile items are excluded even when that empties the list") {
  const auto handle = ReferenceRecommender::train(training_corpus(), 2);
  CHECK(handle.recommend(1, std::vector<ItemId>{0, 1, 2, 3, 4}, 5).empty());
}

TEST_CASE("unseen profiles fall back to popularity rankings") {
  const auto db = training_corpus();
  const auto handle = ReferenceRecommender::train(db, 2, 8);
  // Items 6 and 7 never occur; the scorer sees nothing, so the list is the
  // popularity order: 1 and 2 appear twice, then 3, 4 once, then id order.
  CHECK(handle.recommend(1, std::vector<ItemId>{6, 7}, 4) ==
        RecommendationList{1, 2, 3, 4});
}

TEST_CASE("recommendations are deterministic and duplicate-free") {
  const auto handle = ReferenceRecommender::train(training_corpus(), 2, 8);
  const std::vector<ItemId> profile{1};
  const auto first = handle.recommend(1, profile, 6);
  CHECK(first == handle.recommend(1, profile, 6));
  std::unordered_set<ItemId> seen(first.begin(), first.end());
  CHECK(seen.size() == first.size());
  for (ItemId item : first) CHECK(item != 1);
}

TEST_CASE("k must be positive") {
  const auto handle = ReferenceRecommender::train(training_corpus(), 2);
  CHECK_THROWS_AS(handle.recommend(1, std::vector<ItemId>{1}, 0),
                  std::invalid_argument);
}

TEST_CASE("clustered data is predicted far better than chance") {
  SynthParams params;
  params.n_users = 200;
  params.n_items = 80;
  params.n_clusters = 2;
  params.len_min = 5;
  params.len_max = 8;
  params.cross_cluster_noise = 0.05;
  params.seed = 3;
  const auto ds = synth_dataset(params);
  const auto holdout = holdout_last(ds);

  // Train on the holdout profiles so targets stay unseen.
  InteractionDataset training;
  double mean_len = 0;
  for (const auto& pair : holdout.pairs) {
    training.sequences.push_back({pair.user, pair.profile});
    mean_len += static_cast<double>(pair.profile.size());
  }
  mean_len /= static_cast<double>(holdout.pairs.size());
  const auto handle = ReferenceRecommender::train(training, 7, 80);

  double hits = 0;
  for (const auto& pair : holdout.pairs) {
    const auto list = handle.recommend(pair.user, pair.profile, 5);
    for (std::size_t r = 0; r < list.size(); ++r)
      if (list[r] == pair.target) {
        hits += 1;
        break;
      }
  }
  const double hit_rate = hits / static_cast<double>(holdout.pairs.size());
  const double random_baseline = 5.0 / (80.0 - mean_len);
  CHECK(hit_rate >= 5.0 * random_baseline);
}
