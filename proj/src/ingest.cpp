#include "fsnc/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fsnc {

IngestStats ingest_dataset(const std::filesystem::path& content_path,
                           const std::filesystem::path& edges_path, const std::string& name,
                           std::array<int, 3> split_sizes, const std::filesystem::path& out_dir) {
  std::ifstream content(content_path);
  if (!content) throw FsncError("missing or unreadable file: " + content_path.string());
  std::ifstream edges(edges_path);
  if (!edges) throw FsncError("missing or unreadable file: " + edges_path.string());

  std::map<std::string, int> node_ids;  // raw id -> dense id, first-seen order
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  int n_features = -1;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(content, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(std::move(tok));
    if (tokens.size() < 3) {
      throw FsncError(content_path.string() + ":" + std::to_string(line_no) +
                      ": expected \"id value... label\"");
    }
    if (n_features == -1) {
      n_features = static_cast<int>(tokens.size()) - 2;
    } else if (static_cast<int>(tokens.size()) - 2 != n_features) {
      throw FsncError(content_path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n_features) + " feature values, got " +
                      std::to_string(tokens.size() - 2));
    }
    const std::string& raw_id = tokens.front();
    if (node_ids.contains(raw_id)) {
      throw FsncError(content_path.string() + ":" + std::to_string(line_no) + ": duplicate node id \"" +
                      raw_id + "\"");
    }
    node_ids.emplace(raw_id, static_cast<int>(rows.size()));
    std::vector<double> values(static_cast<std::size_t>(n_features));
    for (int j = 0; j < n_features; ++j) {
      try {
        values[static_cast<std::size_t>(j)] = std::stod(tokens[static_cast<std::size_t>(j) + 1]);
      } catch (const std::exception&) {
        throw FsncError(content_path.string() + ":" + std::to_string(line_no) +
                        ": bad feature value \"" + tokens[static_cast<std::size_t>(j) + 1] + "\"");
      }
    }
    rows.push_back(std::move(values));
    row_labels.push_back(tokens.back());
  }
  if (rows.empty()) throw FsncError(content_path.string() + ": empty feature table");

  const int n = static_cast<int>(rows.size());
  std::vector<std::string> class_names(row_labels.begin(), row_labels.end());
  std::sort(class_names.begin(), class_names.end());
  class_names.erase(std::unique(class_names.begin(), class_names.end()), class_names.end());
  const int n_classes = static_cast<int>(class_names.size());

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto it = std::lower_bound(class_names.begin(), class_names.end(),
                                     row_labels[static_cast<std::size_t>(i)]);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(it - class_names.begin());
  }

  IngestStats stats;
  stats.name = name;
  stats.n_nodes = n;
  stats.n_features = n_features;
  stats.n_classes = n_classes;
  stats.class_names = class_names;

  std::vector<std::pair<int, int>> edge_list;
  {
    std::set<std::pair<int, int>> seen;
    std::string raw_u, raw_v;
    std::size_t edge_line = 0;
    std::string edge_text;
    while (std::getline(edges, edge_text)) {
      ++edge_line;
      if (edge_text.empty()) continue;
      std::istringstream ls(edge_text);
      if (!(ls >> raw_u >> raw_v)) {
        throw FsncError(edges_path.string() + ":" + std::to_string(edge_line) + ": expected \"u v\"");
      }
      const auto iu = node_ids.find(raw_u);
      const auto iv = node_ids.find(raw_v);
      if (iu == node_ids.end()) {
        throw FsncError(edges_path.string() + ":" + std::to_string(edge_line) + ": unknown node id \"" +
                        raw_u + "\"");
      }
      if (iv == node_ids.end()) {
        throw FsncError(edges_path.string() + ":" + std::to_string(edge_line) + ": unknown node id \"" +
                        raw_v + "\"");
      }
      if (iu->second == iv->second) {
        ++stats.self_loops;
        continue;
      }
      const std::pair<int, int> key{std::min(iu->second, iv->second),
                                    std::max(iu->second, iv->second)};
      if (seen.insert(key).second) {
        edge_list.push_back(key);
      } else {
        ++stats.duplicate_edges;
      }
    }
  }
  stats.n_edges = static_cast<std::int64_t>(edge_list.size());

  if (split_sizes[0] + split_sizes[1] + split_sizes[2] != n_classes) {
    throw FsncError("split sizes sum to " +
                    std::to_string(split_sizes[0] + split_sizes[1] + split_sizes[2]) + " but \"" +
                    name + "\" has " + std::to_string(n_classes) + " classes");
  }
  MetaClassSplit split;
  for (int c = 0; c < n_classes; ++c) {
    if (c < split_sizes[0]) {
      split.train.push_back(c);
    } else if (c < split_sizes[0] + split_sizes[1]) {
      split.dev.push_back(c);
    } else {
      split.test.push_back(c);
    }
  }

  DenseMatrix feats(n, n_features);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n_features; ++j) {
      feats.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  Graph g = make_graph(n, n_classes, edge_list, FeatureMatrix::from_dense(std::move(feats)),
                       std::move(labels));
  g.validate();
  save_graph(g, out_dir, name, split);
  return stats;
}

std::string format_stats_table(const IngestStats& stats, std::array<int, 3> split_sizes) {
  std::ostringstream out;
  out << "dataset    nodes    edges    features  |C|  |C_train|  |C_dev|  |C_test|\n";
  out << stats.name << "  " << stats.n_nodes << "  " << stats.n_edges << "  " << stats.n_features
      << "  " << stats.n_classes << "  " << split_sizes[0] << "  " << split_sizes[1] << "  "
      << split_sizes[2] << "\n";
  if (stats.duplicate_edges > 0) {
    out << "warning: collapsed " << stats.duplicate_edges << " duplicate edge line(s)\n";
  }
  if (stats.self_loops > 0) {
    out << "warning: dropped " << stats.self_loops << " self-loop line(s)\n";
  }
  return out.str();
}

}  // namespace fsnc
