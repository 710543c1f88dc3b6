#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "fsnc/rng.hpp"
#include "fsnc/splits.hpp"

namespace fsnc {

/// N-way K-shot Q-query task shape.
struct EpisodeSpec {
  int n_way = 2;
  int k_shot = 1;
  int q_query = 1;

  void validate() const;
};

/// One sampled meta-task. Node ids are local to the view that produced it;
/// episode labels run 0..N-1 in chosen-class order.
struct Episode {
  std::vector<std::pair<int, int>> support;  // (local node id, episode label)
  std::vector<std::pair<int, int>> query;
  std::vector<int> class_map;  // episode label -> original class id
};

/// Samples one episode: N classes uniformly without replacement among the
/// classes with at least K+Q nodes in the view, then K+Q nodes per class
/// uniformly without replacement (first K to support).
Episode sample_episode(const SplitView& view, const EpisodeSpec& spec, RngStream& rng);

/// Episode i uses the substream derived from (master_seed, i), so the batch
/// does not depend on evaluation order or parallelism.
std::vector<Episode> sample_batch(const SplitView& view, const EpisodeSpec& spec, int count,
                                  std::uint64_t master_seed);

/// One JSON object per line: class_map plus support/query (node, label)
/// pairs with node ids in the global frame for audit and replay.
void write_episodes_jsonl(const std::filesystem::path& path, const std::vector<Episode>& episodes,
                          const SplitView& view);
std::vector<Episode> read_episodes_jsonl(const std::filesystem::path& path, const SplitView& view);

}  // namespace fsnc
