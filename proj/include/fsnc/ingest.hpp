#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fsnc/graph.hpp"

namespace fsnc {

struct IngestStats {
  std::string name;
  int n_nodes = 0;
  int n_features = 0;
  int n_classes = 0;
  std::int64_t n_edges = 0;          // undirected, after dedup
  std::int64_t duplicate_edges = 0;  // raw lines collapsed into an existing edge
  std::int64_t self_loops = 0;       // raw self-loop lines dropped
  std::vector<std::string> class_names;  // index == class id
};

/// Converts a feature-table file (one node per line: raw id, d feature
/// values, label string) plus an edge-list file (two raw ids per line)
/// into a dataset directory. Node ids are assigned in first-seen content
/// order; class ids by sorted label name. The class split written into
/// meta.json is the fixed ascending assignment for `split_sizes`.
IngestStats ingest_dataset(const std::filesystem::path& content_path,
                           const std::filesystem::path& edges_path, const std::string& name,
                           std::array<int, 3> split_sizes, const std::filesystem::path& out_dir);

std::string format_stats_table(const IngestStats& stats, std::array<int, 3> split_sizes);

}  // namespace fsnc
