#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "fsnc/graph.hpp"

namespace fsnc {

/// Shape of a synthetic citation-style dataset: planted class communities
/// with class-correlated bag-of-words features, so the generated graphs
/// carry learnable signal for both per-node and message-passing models.
struct SynthSpec {
  std::string name = "synth";
  int n_nodes = 600;
  int n_features = 64;
  int n_classes = 15;
  std::int64_t n_edges = 1800;
  std::array<int, 3> split_sizes{5, 5, 5};
  double intra_class_edge_fraction = 0.85;
  int tokens_per_node = 20;
  double on_topic_fraction = 0.8;

  void validate() const;
};

/// Presets sized like well-known citation benchmarks (desk-scale set).
/// Known names: cora, citeseer, tiny.
SynthSpec synth_preset(const std::string& name);

struct RawDataset {
  std::filesystem::path content;  // "<id> <f1> ... <fd> <label>" per node
  std::filesystem::path edges;    // "<id> <id>" per undirected edge
};

/// Writes raw content/edge files for `spec` under out_dir; deterministic
/// in (spec, seed). The emitted files feed straight into ingest.
RawDataset generate_raw_dataset(const SynthSpec& spec, std::uint64_t seed,
                                const std::filesystem::path& out_dir);

}  // namespace fsnc
