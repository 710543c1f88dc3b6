#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fsnc/graph.hpp"

namespace fsnc {

enum class Setting { transductive, inductive };
enum class Partition { train, dev, test };

std::string to_string(Setting s);
std::string to_string(Partition p);
Setting setting_from_string(const std::string& s);
Partition partition_from_string(const std::string& s);

/// Disjoint partition of the label space into train/dev/test classes.
struct ClassSplit {
  std::vector<int> train_classes;
  std::vector<int> dev_classes;
  std::vector<int> test_classes;

  const std::vector<int>& classes(Partition p) const;
  void validate(int n_classes) const;
};

/// Either the whole graph (transductive) or the partition's induced
/// subgraph (inductive), with node-id mappings between the two frames.
struct SplitView {
  Setting setting = Setting::transductive;
  Partition partition = Partition::train;
  std::shared_ptr<const Graph> graph;
  std::shared_ptr<const NormalizedAdjacency> normalized;
  std::vector<int> to_global;  // local -> global (identity when transductive)
  std::vector<int> to_local;   // global -> local, -1 when absent
  std::vector<int> class_ids;  // partition's classes, ascending
  /// Local ids of nodes labeled with a partition class, ascending.
  std::vector<int> partition_nodes;
  /// class id -> local node ids, ascending; keys are exactly class_ids.
  std::map<int, std::vector<int>> nodes_by_class;
};

/// Seed for class assignment: either the fixed ascending-id assignment or
/// a seeded shuffle.
struct SplitSeed {
  bool fixed = true;
  std::uint64_t value = 0;

  static SplitSeed fixed_assignment() { return {true, 0}; }
  static SplitSeed shuffled(std::uint64_t seed) { return {false, seed}; }
  static SplitSeed parse(const std::string& text);  // "fixed" or a u64
  std::string to_string() const;
};

/// Partitions class ids into (train, dev, test) sets of the given sizes.
ClassSplit split_classes(const Graph& g, int train_size, int dev_size, int test_size,
                         const SplitSeed& seed);

SplitView build_view(std::shared_ptr<const Graph> g, const ClassSplit& split, Setting setting,
                     Partition partition);

struct ViewSet {
  SplitView train;
  SplitView dev;
  SplitView test;

  const SplitView& view(Partition p) const;
};

/// Builds the three partition views. Transductive views share one graph and
/// one normalized adjacency object.
ViewSet build_views(std::shared_ptr<const Graph> g, const ClassSplit& split, Setting setting);

/// Number of edges whose endpoints fall in different partitions.
std::int64_t count_cross_partition_edges(const Graph& g, const ClassSplit& split);

}  // namespace fsnc
