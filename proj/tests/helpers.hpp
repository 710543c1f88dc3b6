#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "fsnc/graph.hpp"
#include "fsnc/rng.hpp"

namespace fsnc::testing {

inline Graph toy_graph(int n_nodes, std::vector<std::pair<int, int>> edges, std::vector<int> labels,
                       int n_classes, DenseMatrix features) {
  return make_graph(n_nodes, n_classes, edges, FeatureMatrix(std::move(features)), std::move(labels));
}

/// Toy graph with one-hot-ish features when none are given.
inline Graph toy_graph(int n_nodes, std::vector<std::pair<int, int>> edges, std::vector<int> labels,
                       int n_classes) {
  DenseMatrix feats(n_nodes, n_classes);
  for (int i = 0; i < n_nodes; ++i) feats.at(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  return toy_graph(n_nodes, std::move(edges), std::move(labels), n_classes, std::move(feats));
}

/// Random graph for oracle comparisons. Every class labels at least one
/// node; edges are drawn independently with probability edge_prob.
inline Graph random_graph(RngStream& rng, int n_nodes, int n_features, int n_classes,
                          double edge_prob) {
  std::vector<int> labels(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    labels[static_cast<std::size_t>(i)] =
        i < n_classes ? i : static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_classes)));
  }
  rng.shuffle(labels);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n_nodes; ++u) {
    for (int v = u + 1; v < n_nodes; ++v) {
      if (rng.next_double() < edge_prob) edges.emplace_back(u, v);
    }
  }
  DenseMatrix feats(n_nodes, n_features);
  for (double& v : feats.values) v = rng.uniform(-1.0, 1.0);
  return toy_graph(n_nodes, std::move(edges), std::move(labels), n_classes, std::move(feats));
}

/// Dense reference for gcn_normalize: D^-1/2 (A + I) D^-1/2 computed with
/// plain dense arithmetic.
inline DenseMatrix dense_normalize_oracle(const Graph& g) {
  const int n = g.n_nodes;
  DenseMatrix a = g.adjacency.to_dense();
  for (int i = 0; i < n; ++i) a.at(i, i) += 1.0;
  std::vector<double> inv_sqrt_deg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) deg += a.at(i, j);
    inv_sqrt_deg[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(deg);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a.at(i, j) *= inv_sqrt_deg[static_cast<std::size_t>(i)] * inv_sqrt_deg[static_cast<std::size_t>(j)];
    }
  }
  return a;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

/// Unique temporary directory under the build tree, cleaned up on exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fsnc_test_" + tag + "_" + std::to_string(++counter) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fsnc::testing
