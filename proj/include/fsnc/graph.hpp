#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fsnc/matrix.hpp"

namespace fsnc {

/// Error with enough context (file, line) to locate bad input.
class FsncError : public std::runtime_error {
 public:
  explicit FsncError(const std::string& what) : std::runtime_error(what) {}
};

/// Immutable attributed graph: symmetric CSR adjacency without self-loops,
/// node features, integer class labels.
struct Graph {
  int n_nodes = 0;
  int n_classes = 0;
  CsrMatrix adjacency;    // n x n, entries 1.0, symmetric, zero diagonal
  FeatureMatrix features;  // n x d
  std::vector<int> labels;  // size n, values in [0, n_classes)

  int n_features() const { return features.cols(); }
  std::int64_t n_undirected_edges() const { return adjacency.nnz() / 2; }
  int degree(int node) const {
    return static_cast<int>(adjacency.indptr[static_cast<std::size_t>(node) + 1] -
                            adjacency.indptr[static_cast<std::size_t>(node)]);
  }
  bool has_edge(int u, int v) const;

  /// Structural invariants: symmetry, sorted indices, no self-loops, label
  /// range. When require_class_coverage is set every class must label at
  /// least one node (true for loaded datasets; induced subgraphs may drop
  /// whole classes).
  void validate(bool require_class_coverage = true) const;
};

/// Symmetrically renormalized adjacency with self-loops:
/// entry (i,j) = 1/sqrt((d_i+1)(d_j+1)) for each edge and diagonal.
struct NormalizedAdjacency {
  CsrMatrix matrix;
};

/// Class partition recorded alongside a dataset.
struct MetaClassSplit {
  std::vector<int> train;
  std::vector<int> dev;
  std::vector<int> test;
};

struct DatasetMeta {
  std::string name;
  int n_nodes = 0;
  int n_features = 0;
  int n_classes = 0;
  MetaClassSplit class_split;
};

/// Builds a validated graph from sorted unique undirected edges.
Graph make_graph(int n_nodes, int n_classes, const std::vector<std::pair<int, int>>& edges,
                 FeatureMatrix features, std::vector<int> labels);

/// Loads a dataset directory (meta.json, edges.tsv, labels.tsv,
/// features.tsv or features.sparse.tsv). Duplicate edge lines, including
/// reversed duplicates, collapse to one undirected edge.
Graph load_graph(const std::filesystem::path& dir);
Graph load_graph(const std::filesystem::path& dir, DatasetMeta* meta_out);

/// Writes a graph back out in the on-disk dataset format.
void save_graph(const Graph& g, const std::filesystem::path& dir, const std::string& name,
                const MetaClassSplit& class_split);

NormalizedAdjacency gcn_normalize(const Graph& g);

/// Subgraph induced on `keep` (deduplicated, sorted ascending). The
/// returned mapping sends old ids to new ids and preserves ascending order.
std::pair<Graph, std::vector<int>> induced_subgraph(const Graph& g, std::vector<int> keep);

}  // namespace fsnc
