#include "returnrec/remote.hpp"

#include <chrono>
#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace returnrec {

using json = nlohmann::json;

RemoteRecommender::RemoteRecommender(std::string endpoint,
                                     std::uint32_t n_items, int timeout_ms,
                                     int max_in_flight)
    : endpoint_(std::move(endpoint)),
      n_items_(n_items),
      timeout_ms_(timeout_ms),
      max_in_flight_(max_in_flight) {
  if (endpoint_.empty()) throw std::invalid_argument("empty endpoint");
  if (timeout_ms_ < 1) throw std::invalid_argument("timeout must be positive");
}

RecommendationList RemoteRecommender::recommend(
    UserId user, std::span<const ItemId> profile, int k) const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  json request;
  request["user_id"] = user;
  request["items"] = std::vector<ItemId>(profile.begin(), profile.end());
  request["k"] = k;

  httplib::Client client(endpoint_);
  client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
  client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
  client.set_write_timeout(std::chrono::milliseconds(timeout_ms_));

  const auto started = std::chrono::steady_clock::now();
  httplib::Result result =
      client.Post("/recommend", request.dump(), "application/json");
  if (!result) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
    const bool deadline = elapsed >= timeout_ms_;
    throw RemoteError(
        deadline ? RemoteErrorKind::timeout : RemoteErrorKind::transport,
        std::string(deadline ? "request timed out after "
                             : "transport failure after ") +
            std::to_string(elapsed) + "ms against " + endpoint_ + " (" +
            httplib::to_string(result.error()) + ")");
  }
  if (result->status != 200)
    throw RemoteError(RemoteErrorKind::transport,
                      "endpoint returned status " +
                          std::to_string(result->status));

  json response;
  try {
    response = json::parse(result->body);
  } catch (const json::exception& e) {
    throw RemoteError(RemoteErrorKind::malformed,
                      std::string("response is not valid JSON: ") + e.what());
  }
  if (!response.is_object() || !response.contains("items") ||
      !response["items"].is_array())
    throw RemoteError(RemoteErrorKind::malformed,
                      "response lacks an 'items' array");

  RecommendationList items;
  for (const auto& value : response["items"]) {
    if (!value.is_number_unsigned())
      throw RemoteError(RemoteErrorKind::malformed,
                        "response item is not a non-negative integer");
    const std::uint64_t id = value.get<std::uint64_t>();
    if (id >= n_items_)
      throw RemoteError(RemoteErrorKind::invalid_items,
                        "response item " + std::to_string(id) +
                            " outside the catalog of " +
                            std::to_string(n_items_));
    items.push_back(static_cast<ItemId>(id));
  }

  if (items.size() > static_cast<std::size_t>(k))
    throw RemoteError(RemoteErrorKind::invalid_items,
                      "response longer than k=" + std::to_string(k));
  std::unordered_set<ItemId> seen;
  for (ItemId item : items)
    if (!seen.insert(item).second)
      throw RemoteError(RemoteErrorKind::invalid_items,
                        "duplicate item " + std::to_string(item) +
                            " in response");
  const std::unordered_set<ItemId> query(profile.begin(), profile.end());
  for (ItemId item : items)
    if (query.contains(item))
      throw RemoteError(RemoteErrorKind::invalid_items,
                        "response item " + std::to_string(item) +
                            " already present in the query profile");
  return items;
}

}  // namespace returnrec
