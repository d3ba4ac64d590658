#include "returnrec/synth.hpp"

#include <stdexcept>

#include "returnrec/rng.hpp"

namespace returnrec {

InteractionDataset synth_dataset(const SynthParams& params) {
  if (params.n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (params.n_items < 1) throw std::invalid_argument("n_items must be >= 1");
  if (params.n_clusters < 1 || params.n_clusters > params.n_items)
    throw std::invalid_argument("n_clusters must be in [1, n_items]");
  if (params.len_min < 1 || params.len_min > params.len_max)
    throw std::invalid_argument("invalid sequence length range");
  if (params.cross_cluster_noise < 0 || params.cross_cluster_noise > 1)
    throw std::invalid_argument("cross_cluster_noise must be in [0, 1]");

  const std::size_t k = params.n_clusters;
  auto cluster_begin = [&](std::size_t c) { return c * params.n_items / k; };

  // Sequences are short ring walks inside the home cluster, so the corpus
  // carries sequential transition structure (co-occurrence concentrates on
  // small ring distances at small gaps) instead of being gap-uniform.
  // Interior transitions mostly browse locally (step 1-2) with occasional
  // fixed-distance jumps; sequences always close on a jump, like a session
  // that ends on a related but non-adjacent item. Interior jumps keep the
  // closing transition learnable from holdout-truncated histories.
  InteractionDataset ds;
  ds.sequences.reserve(params.n_users);
  for (std::size_t u = 0; u < params.n_users; ++u) {
    Rng rng(derive_seed(params.seed, stream::synth, u));
    const std::size_t home = rng.bounded(k);
    const std::size_t len =
        params.len_min + rng.bounded(params.len_max - params.len_min + 1);
    const std::size_t lo = cluster_begin(home);
    const std::size_t size = cluster_begin(home + 1) - lo;

    InteractionSequence seq;
    seq.user = static_cast<UserId>(u);
    seq.items.reserve(len);
    std::size_t cursor = rng.bounded(size);
    seq.items.push_back(static_cast<ItemId>(lo + cursor));
    for (std::size_t i = 1; i < len; ++i) {
      if (k > 1 && rng.uniform01() < params.cross_cluster_noise) {
        // Foreign interruption; the walk resumes from the cursor afterwards.
        std::size_t other = rng.bounded(k - 1);
        if (other >= home) ++other;
        const std::size_t olo = cluster_begin(other);
        const std::size_t ohi = cluster_begin(other + 1);
        seq.items.push_back(static_cast<ItemId>(olo + rng.bounded(ohi - olo)));
        continue;
      }
      std::size_t step;
      if (i + 1 == len || rng.uniform01() < 0.25) {
        step = 4;
      } else {
        step = 1 + rng.bounded(2);
      }
      cursor = (cursor + step) % size;
      seq.items.push_back(static_cast<ItemId>(lo + cursor));
    }
    ds.sequences.push_back(std::move(seq));
  }
  return ds;
}

}  // namespace returnrec
