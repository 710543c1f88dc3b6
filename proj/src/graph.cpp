#include "fsnc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fsnc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw FsncError(msg); }

[[noreturn]] void fail_at(const std::filesystem::path& file, std::size_t line, const std::string& msg) {
  fail(file.string() + ":" + std::to_string(line) + ": " + msg);
}

std::ifstream open_or_fail(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) fail("missing or unreadable file: " + p.string());
  return in;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in = open_or_fail(p);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(p.string() + ": invalid JSON: " + e.what());
  }
  return j;
}

std::vector<int> parse_class_list(const json& j, const std::filesystem::path& p, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    fail(p.string() + ": class_split." + std::string(key) + " missing or not an array");
  }
  std::vector<int> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<int>());
  return out;
}

}  // namespace

bool Graph::has_edge(int u, int v) const {
  const auto begin = adjacency.indices.begin() + static_cast<std::ptrdiff_t>(adjacency.indptr[static_cast<std::size_t>(u)]);
  const auto end = adjacency.indices.begin() + static_cast<std::ptrdiff_t>(adjacency.indptr[static_cast<std::size_t>(u) + 1]);
  return std::binary_search(begin, end, v);
}

void Graph::validate(bool require_class_coverage) const {
  if (adjacency.rows != n_nodes || adjacency.cols != n_nodes) fail("adjacency shape mismatch");
  if (static_cast<int>(labels.size()) != n_nodes) fail("label count mismatch");
  if (features.rows() != n_nodes) fail("feature row count mismatch");
  if (n_classes <= 0) fail("n_classes must be positive");

  for (int i = 0; i < n_nodes; ++i) {
    int prev = -1;
    for (std::int64_t k = adjacency.indptr[static_cast<std::size_t>(i)];
         k < adjacency.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = adjacency.indices[static_cast<std::size_t>(k)];
      if (j < 0 || j >= n_nodes) fail("adjacency column index out of range");
      if (j <= prev) fail("adjacency columns not strictly increasing in row " + std::to_string(i));
      if (j == i) fail("self-loop stored at node " + std::to_string(i));
      prev = j;
    }
  }
  // symmetry
  for (int i = 0; i < n_nodes; ++i) {
    for (std::int64_t k = adjacency.indptr[static_cast<std::size_t>(i)];
         k < adjacency.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      if (!has_edge(adjacency.indices[static_cast<std::size_t>(k)], i)) {
        fail("adjacency not symmetric at edge (" + std::to_string(i) + "," +
             std::to_string(adjacency.indices[static_cast<std::size_t>(k)]) + ")");
      }
    }
  }

  std::vector<int> class_count(static_cast<std::size_t>(n_classes), 0);
  for (int i = 0; i < n_nodes; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    if (c < 0 || c >= n_classes) {
      fail("label out of range at node " + std::to_string(i) + ": " + std::to_string(c));
    }
    ++class_count[static_cast<std::size_t>(c)];
  }
  if (require_class_coverage) {
    for (int c = 0; c < n_classes; ++c) {
      if (class_count[static_cast<std::size_t>(c)] == 0) {
        fail("class " + std::to_string(c) + " labels no node");
      }
    }
  }
}

Graph make_graph(int n_nodes, int n_classes, const std::vector<std::pair<int, int>>& edges,
                 FeatureMatrix features, std::vector<int> labels) {
  Graph g;
  g.n_nodes = n_nodes;
  g.n_classes = n_classes;
  g.features = std::move(features);
  g.labels = std::move(labels);

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_nodes));
  for (const auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  g.adjacency = CsrMatrix(n_nodes, n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    auto& row = adj[static_cast<std::size_t>(i)];
    std::sort(row.begin(), row.end());
    for (int j : row) {
      g.adjacency.indices.push_back(j);
      g.adjacency.values.push_back(1.0);
    }
    g.adjacency.indptr[static_cast<std::size_t>(i) + 1] =
        static_cast<std::int64_t>(g.adjacency.indices.size());
  }
  return g;
}

Graph load_graph(const std::filesystem::path& dir) {
  return load_graph(dir, nullptr);
}

Graph load_graph(const std::filesystem::path& dir, DatasetMeta* meta_out) {
  const auto meta_path = dir / "meta.json";
  const json meta = read_json(meta_path);
  for (const char* key : {"name", "n_nodes", "n_features", "n_classes", "class_split"}) {
    if (!meta.contains(key)) fail(meta_path.string() + ": missing key \"" + key + "\"");
  }
  DatasetMeta dm;
  dm.name = meta.at("name").get<std::string>();
  dm.n_nodes = meta.at("n_nodes").get<int>();
  dm.n_features = meta.at("n_features").get<int>();
  dm.n_classes = meta.at("n_classes").get<int>();
  dm.class_split.train = parse_class_list(meta.at("class_split"), meta_path, "train");
  dm.class_split.dev = parse_class_list(meta.at("class_split"), meta_path, "dev");
  dm.class_split.test = parse_class_list(meta.at("class_split"), meta_path, "test");
  if (dm.n_nodes <= 0) fail(meta_path.string() + ": n_nodes must be positive");

  const int n = dm.n_nodes;
  const int d = dm.n_features;
  const int c = dm.n_classes;

  // labels.tsv: every node exactly once
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  {
    const auto path = dir / "labels.tsv";
    std::ifstream in = open_or_fail(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream ls(line);
      long node = -1, cls = -1;
      if (!(ls >> node >> cls)) fail_at(path, line_no, "expected \"node class\"");
      if (node < 0 || node >= n) fail_at(path, line_no, "node id out of range: " + std::to_string(node));
      if (cls < 0 || cls >= c) fail_at(path, line_no, "label out of range: " + std::to_string(cls));
      if (labels[static_cast<std::size_t>(node)] != -1) {
        fail_at(path, line_no, "duplicate label for node " + std::to_string(node));
      }
      labels[static_cast<std::size_t>(node)] = static_cast<int>(cls);
    }
    for (int i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] == -1) {
        fail(path.string() + ": node " + std::to_string(i) + " has no label (manifest says " +
             std::to_string(n) + " nodes)");
      }
    }
  }

  // edges.tsv: dedupe, (u,v) == (v,u)
  std::vector<std::pair<int, int>> edges;
  {
    const auto path = dir / "edges.tsv";
    std::ifstream in = open_or_fail(path);
    std::set<std::pair<int, int>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream ls(line);
      long u = -1, v = -1;
      if (!(ls >> u >> v)) fail_at(path, line_no, "expected \"u v\"");
      if (u < 0 || u >= n) fail_at(path, line_no, "node id out of range: " + std::to_string(u));
      if (v < 0 || v >= n) fail_at(path, line_no, "node id out of range: " + std::to_string(v));
      if (u == v) fail_at(path, line_no, "self-loop " + std::to_string(u));
      const std::pair<int, int> key{static_cast<int>(std::min(u, v)), static_cast<int>(std::max(u, v))};
      if (seen.insert(key).second) edges.push_back(key);
    }
  }

  // features: exactly one of the two formats
  const auto dense_path = dir / "features.tsv";
  const auto sparse_path = dir / "features.sparse.tsv";
  const bool have_dense = std::filesystem::exists(dense_path);
  const bool have_sparse = std::filesystem::exists(sparse_path);
  if (have_dense && have_sparse) {
    fail(dir.string() + ": both features.tsv and features.sparse.tsv present");
  }
  if (!have_dense && !have_sparse) {
    fail(dir.string() + ": missing features.tsv or features.sparse.tsv");
  }

  DenseMatrix feats(n, d);
  if (have_dense) {
    std::ifstream in = open_or_fail(dense_path);
    std::vector<bool> filled(static_cast<std::size_t>(n), false);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream ls(line);
      long node = -1;
      if (!(ls >> node)) fail_at(dense_path, line_no, "expected node id");
      if (node < 0 || node >= n) fail_at(dense_path, line_no, "node id out of range");
      if (filled[static_cast<std::size_t>(node)]) fail_at(dense_path, line_no, "duplicate feature row");
      for (int j = 0; j < d; ++j) {
        double v;
        if (!(ls >> v)) fail_at(dense_path, line_no, "expected " + std::to_string(d) + " feature values");
        feats.at(static_cast<int>(node), j) = v;
      }
      double extra;
      if (ls >> extra) fail_at(dense_path, line_no, "more than " + std::to_string(d) + " feature values");
      filled[static_cast<std::size_t>(node)] = true;
    }
    for (int i = 0; i < n; ++i) {
      if (!filled[static_cast<std::size_t>(i)]) {
        fail(dense_path.string() + ": node " + std::to_string(i) + " has no feature row");
      }
    }
  } else {
    std::ifstream in = open_or_fail(sparse_path);
    std::set<std::pair<int, int>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream ls(line);
      long node = -1, dim = -1;
      double value = 0.0;
      if (!(ls >> node >> dim >> value)) fail_at(sparse_path, line_no, "expected \"node dim value\"");
      if (node < 0 || node >= n) fail_at(sparse_path, line_no, "node id out of range");
      if (dim < 0 || dim >= d) fail_at(sparse_path, line_no, "feature dim out of range");
      if (!seen.insert({static_cast<int>(node), static_cast<int>(dim)}).second) {
        fail_at(sparse_path, line_no, "duplicate (node, dim) entry");
      }
      feats.at(static_cast<int>(node), static_cast<int>(dim)) = value;
    }
  }

  Graph g = make_graph(n, c, edges, FeatureMatrix::from_dense(std::move(feats)), std::move(labels));
  g.validate();

  // manifest cross-checks on the class split
  {
    std::vector<int> all;
    for (const auto* part : {&dm.class_split.train, &dm.class_split.dev, &dm.class_split.test}) {
      all.insert(all.end(), part->begin(), part->end());
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
      fail(meta_path.string() + ": class_split sets overlap");
    }
    for (int cls : all) {
      if (cls < 0 || cls >= c) fail(meta_path.string() + ": class_split id out of range");
    }
  }
  if (g.n_features() != d) fail(meta_path.string() + ": n_features mismatch with feature file");

  if (meta_out != nullptr) *meta_out = dm;
  return g;
}

void save_graph(const Graph& g, const std::filesystem::path& dir, const std::string& name,
                const MetaClassSplit& class_split) {
  std::filesystem::create_directories(dir);

  json meta;
  meta["name"] = name;
  meta["n_nodes"] = g.n_nodes;
  meta["n_features"] = g.n_features();
  meta["n_classes"] = g.n_classes;
  meta["class_split"] = {{"train", class_split.train}, {"dev", class_split.dev}, {"test", class_split.test}};
  std::ofstream(dir / "meta.json") << meta.dump(2) << "\n";

  {
    std::ofstream out(dir / "edges.tsv");
    for (int u = 0; u < g.n_nodes; ++u) {
      for (std::int64_t k = g.adjacency.indptr[static_cast<std::size_t>(u)];
           k < g.adjacency.indptr[static_cast<std::size_t>(u) + 1]; ++k) {
        const int v = g.adjacency.indices[static_cast<std::size_t>(k)];
        if (u < v) out << u << "\t" << v << "\n";
      }
    }
  }
  {
    std::ofstream out(dir / "labels.tsv");
    for (int i = 0; i < g.n_nodes; ++i) out << i << "\t" << g.labels[static_cast<std::size_t>(i)] << "\n";
  }
  if (g.features.is_sparse()) {
    std::ofstream out(dir / "features.sparse.tsv");
    out.precision(17);
    const CsrMatrix& f = g.features.sparse();
    for (int i = 0; i < f.rows; ++i) {
      for (std::int64_t k = f.indptr[static_cast<std::size_t>(i)];
           k < f.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
        out << i << "\t" << f.indices[static_cast<std::size_t>(k)] << "\t"
            << f.values[static_cast<std::size_t>(k)] << "\n";
      }
    }
  } else {
    std::ofstream out(dir / "features.tsv");
    out.precision(17);
    const DenseMatrix& f = g.features.dense();
    for (int i = 0; i < f.rows; ++i) {
      out << i;
      for (int j = 0; j < f.cols; ++j) out << "\t" << f.at(i, j);
      out << "\n";
    }
  }
}

NormalizedAdjacency gcn_normalize(const Graph& g) {
  const int n = g.n_nodes;
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    inv_sqrt[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(static_cast<double>(g.degree(i)) + 1.0);
  }

  CsrMatrix m(n, n);
  m.indices.reserve(static_cast<std::size_t>(g.adjacency.nnz()) + static_cast<std::size_t>(n));
  m.values.reserve(m.indices.capacity());
  for (int i = 0; i < n; ++i) {
    bool diag_done = false;
    auto push = [&](int j) {
      m.indices.push_back(j);
      m.values.push_back(inv_sqrt[static_cast<std::size_t>(i)] * inv_sqrt[static_cast<std::size_t>(j)]);
    };
    for (std::int64_t k = g.adjacency.indptr[static_cast<std::size_t>(i)];
         k < g.adjacency.indptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const int j = g.adjacency.indices[static_cast<std::size_t>(k)];
      if (!diag_done && j > i) {
        push(i);
        diag_done = true;
      }
      push(j);
    }
    if (!diag_done) push(i);
    m.indptr[static_cast<std::size_t>(i) + 1] = static_cast<std::int64_t>(m.indices.size());
  }
  return NormalizedAdjacency{std::move(m)};
}

std::pair<Graph, std::vector<int>> induced_subgraph(const Graph& g, std::vector<int> keep) {
  if (keep.empty()) fail("induced_subgraph: empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int id : keep) {
    if (id < 0 || id >= g.n_nodes) fail("induced_subgraph: node id out of range: " + std::to_string(id));
  }

  std::vector<int> old_to_new(static_cast<std::size_t>(g.n_nodes), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) old_to_new[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);

  Graph sub;
  sub.n_nodes = static_cast<int>(keep.size());
  sub.n_classes = g.n_classes;
  sub.adjacency = g.adjacency.select(keep, old_to_new);
  sub.adjacency.cols = sub.n_nodes;
  sub.features = g.features.gather(keep);
  sub.labels.reserve(keep.size());
  for (int id : keep) sub.labels.push_back(g.labels[static_cast<std::size_t>(id)]);
  return {std::move(sub), std::move(old_to_new)};
}

}  // namespace fsnc
