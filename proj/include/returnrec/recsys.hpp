#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "returnrec/dataset.hpp"
#include "returnrec/graph.hpp"
#include "returnrec/types.hpp"

namespace returnrec {

// Query contract for any victim recommender. Implementations must answer
// deterministically for fixed internal state, never return duplicates, and
// never return items present in the query profile.
class Recommender {
 public:
  virtual ~Recommender() = default;

  virtual RecommendationList recommend(UserId user,
                                       std::span<const ItemId> profile,
                                       int k) const = 0;

  // Handles that cannot serve overlapping queries return false; callers
  // must then serialize access.
  virtual bool concurrent_queries() const { return true; }
};

// Desk-scale stand-in for a trained sequential recommender. Scores a
// candidate for the next position by summing its co-occurrence counts with
// each profile item at the gap separating that item from the hypothetical
// next position. Unscored candidates rank after scored ones by training
// popularity, then by ascending id, which also guarantees full-length lists
// whenever the catalog allows.
class ReferenceRecommender : public Recommender {
 public:
  ReferenceRecommender(std::shared_ptr<const MultiHopGraph> graph,
                       std::vector<Count> popularity);

  // Builds the co-occurrence graph and popularity table from the training
  // database. Throws on an empty database.
  static ReferenceRecommender train(const InteractionDataset& db, int max_hop,
                                    std::uint32_t n_items = 0);

  RecommendationList recommend(UserId user, std::span<const ItemId> profile,
                               int k) const override;

  const MultiHopGraph& graph() const { return *graph_; }

 private:
  std::shared_ptr<const MultiHopGraph> graph_;
  std::vector<Count> popularity_;
  std::vector<ItemId> popularity_order_;  // (popularity desc, id asc)
};

// Caps the number of overlapping queries against a handle that declares a
// maximum in-flight request count. A limit of 1 serializes the handle.
class ThrottledRecommender : public Recommender {
 public:
  ThrottledRecommender(std::shared_ptr<const Recommender> inner,
                       int max_in_flight)
      : inner_(std::move(inner)),
        slots_(max_in_flight < 1 ? 1 : max_in_flight) {}

  RecommendationList recommend(UserId user, std::span<const ItemId> profile,
                               int k) const override {
    {
      std::unique_lock<std::mutex> lock(mutex_);
      released_.wait(lock, [this] { return in_flight_ < slots_; });
      ++in_flight_;
    }
    try {
      RecommendationList out = inner_->recommend(user, profile, k);
      release();
      return out;
    } catch (...) {
      release();
      throw;
    }
  }

  bool concurrent_queries() const override { return true; }

 private:
  void release() const {
    std::lock_guard<std::mutex> lock(mutex_);
    --in_flight_;
    released_.notify_one();
  }

  std::shared_ptr<const Recommender> inner_;
  int slots_;
  mutable int in_flight_ = 0;
  mutable std::mutex mutex_;
  mutable std::condition_variable released_;
};

// Serializes queries to a handle that does not support concurrent use.
class SerializedRecommender : public Recommender {
 public:
  explicit SerializedRecommender(std::shared_ptr<const Recommender> inner)
      : inner_(std::move(inner)) {}

  RecommendationList recommend(UserId user, std::span<const ItemId> profile,
                               int k) const override {
    std::lock_guard<std::mutex> guard(mutex_);
    return inner_->recommend(user, profile, k);
  }

  bool concurrent_queries() const override { return true; }

 private:
  std::shared_ptr<const Recommender> inner_;
  mutable std::mutex mutex_;
};

}  // namespace returnrec
