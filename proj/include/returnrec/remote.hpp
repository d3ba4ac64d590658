#pragma once

#include <stdexcept>
#include <string>

#include "returnrec/recsys.hpp"

namespace returnrec {

enum class RemoteErrorKind {
  transport,      // connection failure, non-200 status
  timeout,        // request exceeded the configured deadline
  malformed,      // response body is not the expected shape
  invalid_items,  // response violates list invariants (dupes, range, ...)
};

class RemoteError : public std::runtime_error {
 public:
  RemoteError(RemoteErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  RemoteErrorKind kind() const { return kind_; }

 private:
  RemoteErrorKind kind_;
};

// Client for an external recommender behind the wire protocol:
// POST <endpoint>/recommend with JSON body
//   {"user_id": <int>, "items": [<int>, ...], "k": <int>}
// expecting {"items": [<int>, ...]} with at most k distinct ids below the
// catalog size and none of the query items. Every violation raises a
// RemoteError with a distinct kind; responses are never silently truncated.
class RemoteRecommender : public Recommender {
 public:
  RemoteRecommender(std::string endpoint, std::uint32_t n_items,
                    int timeout_ms = 5000, int max_in_flight = 4);

  RecommendationList recommend(UserId user, std::span<const ItemId> profile,
                               int k) const override;

  bool concurrent_queries() const override { return max_in_flight_ > 1; }
  int max_in_flight() const { return max_in_flight_; }

 private:
  std::string endpoint_;
  std::uint32_t n_items_;
  int timeout_ms_;
  int max_in_flight_;
};

}  // namespace returnrec
