#pragma once

#include <cstdint>

#include "returnrec/dataset.hpp"

namespace returnrec {

// Clustered synthetic interaction corpus: items are partitioned into
// contiguous clusters, each user draws a home cluster and samples a
// sequence mostly within it. cross_cluster_noise is the per-item
// probability of drawing from a foreign cluster instead.
struct SynthParams {
  std::size_t n_users = 500;
  std::size_t n_items = 200;
  std::size_t n_clusters = 4;
  std::size_t len_min = 6;
  std::size_t len_max = 12;
  double cross_cluster_noise = 0.1;
  std::uint64_t seed = 0;
};

InteractionDataset synth_dataset(const SynthParams& params);

}  // namespace returnrec
