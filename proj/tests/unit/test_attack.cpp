#include <doctest.h>

#include <algorithm>

#include "returnrec/attack.hpp"
#include "returnrec/synth.hpp"

using namespace returnrec;

namespace {

// Strips the tracked insertions; the result must equal the benign profile.
std::vector<ItemId> strip_insertions(const AttackedProfile& attacked) {
  std::vector<ItemId> out;
  std::size_t next = 0;
  for (std::size_t i = 0; i < attacked.items.size(); ++i) {
    if (next < attacked.inserted_positions.size() &&
        attacked.inserted_positions[next] == i) {
      ++next;
      continue;
    }
    out.push_back(attacked.items[i]);
  }
  return out;
}

// Victim whose target ranking collapses only when the marker item appears.
class MarkerVictim : public Recommender {
 public:
  MarkerVictim(ItemId marker, ItemId target)
      : marker_(marker), target_(target) {}
  RecommendationList recommend(UserId, std::span<const ItemId> profile,
                               int) const override {
    for (ItemId item : profile)
      if (item == marker_) return {};  // target absent -> worst rank
    return {target_};
  }

 private:
  ItemId marker_;
  ItemId target_;
};

int rank_of(const Recommender& victim, UserId user,
            const std::vector<ItemId>& profile, ItemId target, int k) {
  const auto list = victim.recommend(user, profile, k);
  for (std::size_t r = 0; r < list.size(); ++r)
    if (list[r] == target) return static_cast<int>(r) + 1;
  return k + 1;
}

}  // namespace

TEST_CASE("random attack with delta 0 is the identity") {
  AttackSpec spec;
  spec.delta = 0;
  const std::vector<ItemId> profile{3, 1, 4};
  const auto attacked = random_attack(profile, spec, 10, 1);
  CHECK(attacked.items == profile);
  CHECK(attacked.inserted_positions.empty());
}

TEST_CASE("random attack inserts delta tracked foreign items") {
  AttackSpec spec;
  spec.delta = 3;
  spec.seed = 21;
  const std::vector<ItemId> profile{0, 1, 2, 3, 4};
  const auto attacked = random_attack(profile, spec, 50, 7);
  CHECK(attacked.items.size() == 8);
  CHECK(attacked.inserted_positions.size() == 3);
  CHECK(strip_insertions(attacked) == profile);

  // Perturbations are foreign and distinct.
  std::vector<ItemId> inserted;
  for (std::size_t pos : attacked.inserted_positions)
    inserted.push_back(attacked.items[pos]);
  std::sort(inserted.begin(), inserted.end());
  CHECK(std::adjacent_find(inserted.begin(), inserted.end()) ==
        inserted.end());
  for (ItemId item : inserted)
    CHECK(std::find(profile.begin(), profile.end(), item) == profile.end());
}

TEST_CASE("random attack is seed deterministic") {
  AttackSpec spec;
  spec.delta = 2;
  spec.seed = 5;
  const std::vector<ItemId> profile{1, 2, 3};
  const auto a = random_attack(profile, spec, 30, 9);
  const auto b = random_attack(profile, spec, 30, 9);
  CHECK(a.items == b.items);
  CHECK(a.inserted_positions == b.inserted_positions);
  const auto other_user = random_attack(profile, spec, 30, 10);
  // Different users draw from independent streams (almost surely distinct).
  CHECK((other_user.items != a.items ||
         other_user.inserted_positions != a.inserted_positions));
}

TEST_CASE("random attack fails when nothing is insertable") {
  AttackSpec spec;
  spec.delta = 1;
  const std::vector<ItemId> profile{0, 1, 2};
  CHECK_THROWS_AS(random_attack(profile, spec, 3, 1), std::runtime_error);
}

TEST_CASE("greedy attack finds the unique damaging insertion") {
  // Catalog {0,1,2}; the profile holds 0 and 1, so item 2 is the only
  // insertable candidate and is exactly the victim's trigger.
  AttackSpec spec;
  spec.delta = 1;
  spec.candidate_budget = 4;
  spec.seed = 3;
  const MarkerVictim victim(2, 1);
  const std::vector<ItemId> profile{0, 1};
  const auto attacked = greedy_attack(profile, spec, victim, 1, 5, 3, 11);
  REQUIRE(attacked.inserted_positions.size() == 1);
  CHECK(attacked.items[attacked.inserted_positions[0]] == 2);
  CHECK(strip_insertions(attacked) == profile);
}

TEST_CASE("greedy attack still inserts when every candidate backfires") {
  // This victim ranks the target first as soon as any insertion appears, so
  // every candidate improves the target's rank; the attack must still place
  // exactly delta items (the least-improving ones).
  class HelpfulVictim : public Recommender {
   public:
    explicit HelpfulVictim(std::size_t benign_len) : benign_len_(benign_len) {}
    RecommendationList recommend(UserId, std::span<const ItemId> profile,
                                 int) const override {
      return profile.size() > benign_len_ ? RecommendationList{1}
                                          : RecommendationList{};
    }

   private:
    std::size_t benign_len_;
  };

  AttackSpec spec;
  spec.delta = 2;
  spec.candidate_budget = 6;
  spec.seed = 8;
  const std::vector<ItemId> profile{0, 1};
  const HelpfulVictim victim(profile.size());
  const auto attacked = greedy_attack(profile, spec, victim, 1, 5, 10, 2);
  CHECK(attacked.inserted_positions.size() == 2);
  CHECK(strip_insertions(attacked) == profile);
}

TEST_CASE("greedy attack with delta 0 is the identity") {
  AttackSpec spec;
  spec.delta = 0;
  const MarkerVictim victim(2, 1);
  const std::vector<ItemId> profile{0, 1};
  const auto attacked = greedy_attack(profile, spec, victim, 1, 5, 3, 1);
  CHECK(attacked.items == profile);
}

TEST_CASE("greedy attack degrades at least as much as random") {
  SynthParams params;
  params.n_users = 120;
  params.n_items = 80;
  params.n_clusters = 2;
  params.len_min = 5;
  params.len_max = 8;
  params.cross_cluster_noise = 0.05;
  params.seed = 13;
  const auto ds = synth_dataset(params);
  const auto holdout = holdout_last(ds);

  InteractionDataset training;
  for (const auto& pair : holdout.pairs)
    training.sequences.push_back({pair.user, pair.profile});
  const auto victim = ReferenceRecommender::train(training, 7, 80);

  AttackSpec spec;
  spec.delta = 3;
  spec.candidate_budget = 16;
  spec.seed = 2;

  const int k = 10;
  double random_rank = 0, greedy_rank = 0;
  for (const auto& pair : holdout.pairs) {
    const auto rnd = random_attack(pair.profile, spec, 80, pair.user);
    const auto greedy =
        greedy_attack(pair.profile, spec, victim, pair.target, k, 80,
                      pair.user);
    CHECK(strip_insertions(greedy) == pair.profile);
    random_rank += rank_of(victim, pair.user, rnd.items, pair.target, k);
    greedy_rank += rank_of(victim, pair.user, greedy.items, pair.target, k);
  }
  // Larger mean rank = more damage.
  CHECK(greedy_rank >= random_rank);
}
