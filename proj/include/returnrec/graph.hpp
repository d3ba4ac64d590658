#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "returnrec/dataset.hpp"
#include "returnrec/types.hpp"

namespace returnrec {

class GraphLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Family of symmetric sparse item co-occurrence count matrices, one per
// positional hop. Hop e counts, over every sequence in the source database,
// the unordered pairs of items that appear exactly e positions apart; each
// positional pair increments its count once. Self pairs (the same item at
// two positions) count like any other pair.
//
// Immutable after build/load and safe for concurrent reads.
class MultiHopGraph {
 public:
  MultiHopGraph(int max_hop, std::uint32_t n_items);

  // Counts all positional pairs with gap <= max_hop. n_items 0 means
  // "derive from the database" (max id + 1); pass the catalog size
  // explicitly when evaluation profiles may contain items the database
  // never saw.
  static MultiHopGraph build(const InteractionDataset& db, int max_hop,
                             std::uint32_t n_items = 0);

  int max_hop() const { return max_hop_; }
  std::uint32_t n_items() const { return n_items_; }

  // Stored count for the unordered pair (a, b) at the given hop; 0 when
  // absent and 0 for hops beyond max_hop. Throws std::out_of_range when an
  // item id is outside the catalog.
  Count co_count(ItemId a, ItemId b, int hop) const;

  // Sum of co_count(a, z, hop) over the whole catalog.
  Count row_sum(ItemId a, int hop) const;

  // Hop-e adjacency of one item. Empty map when the item has no neighbors
  // at that hop (or the hop exceeds max_hop).
  const std::unordered_map<ItemId, Count>& neighbors(ItemId a, int hop) const;

  // Adds c to the pair count; both orientations and row sums stay in sync.
  void add_pair(ItemId a, ItemId b, int hop, Count c = 1);

  // Number of stored unordered pairs at one hop.
  std::size_t stored_pairs(int hop) const;

  // Deterministic text serialization:
  //   RETURN-GRAPH v1 max_hop=<H> n_items=<N>
  //   <hop>\t<i>\t<j>\t<count>\n   with i <= j, sorted by (hop, i, j)
  // Row sums are recomputed on load.
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;
  static MultiHopGraph parse(std::string_view text);
  static MultiHopGraph load(const std::filesystem::path& path);

  bool operator==(const MultiHopGraph& other) const;

 private:
  int max_hop_;
  std::uint32_t n_items_;
  // adj_[hop-1][item]: neighbor -> count, both orientations stored.
  std::vector<std::vector<std::unordered_map<ItemId, Count>>> adj_;
  std::vector<std::vector<Count>> row_sums_;
};

}  // namespace returnrec
