#include "fsnc/datagen.hpp"

#include <fstream>
#include <set>
#include <vector>

#include "fsnc/rng.hpp"

namespace fsnc {

void SynthSpec::validate() const {
  if (n_nodes < n_classes || n_classes < 3) throw FsncError("synth spec: need n_nodes >= n_classes >= 3");
  if (n_features < n_classes) throw FsncError("synth spec: need n_features >= n_classes");
  if (split_sizes[0] + split_sizes[1] + split_sizes[2] != n_classes) {
    throw FsncError("synth spec: split sizes must sum to n_classes");
  }
  const std::int64_t max_edges =
      static_cast<std::int64_t>(n_nodes) * (static_cast<std::int64_t>(n_nodes) - 1) / 2;
  if (n_edges < 0 || n_edges > max_edges / 2) {
    throw FsncError("synth spec: edge count too large for rejection sampling");
  }
}

SynthSpec synth_preset(const std::string& name) {
  SynthSpec s;
  s.name = name;
  if (name == "cora") {
    s.n_nodes = 2708;
    s.n_edges = 5278;
    s.n_features = 1433;
    s.n_classes = 7;
    s.split_sizes = {3, 2, 2};
  } else if (name == "citeseer") {
    s.n_nodes = 3327;
    s.n_edges = 4552;
    s.n_features = 3703;
    s.n_classes = 6;
    s.split_sizes = {2, 2, 2};
  } else if (name == "tiny") {
    s.n_nodes = 600;
    s.n_edges = 1800;
    s.n_features = 64;
    s.n_classes = 15;
    s.split_sizes = {5, 5, 5};
    s.tokens_per_node = 8;
  } else {
    throw FsncError("unknown synth preset: \"" + name + "\" (known: cora, citeseer, tiny)");
  }
  return s;
}

RawDataset generate_raw_dataset(const SynthSpec& spec, std::uint64_t seed,
                                const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  RngStream rng(mix_seed({seed, 0x53796e7468ULL}));

  const int n = spec.n_nodes;
  const int c = spec.n_classes;
  const int d = spec.n_features;

  // near-balanced labels, shuffled
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % c;
  rng.shuffle(labels);

  std::vector<std::vector<int>> members(static_cast<std::size_t>(c));
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);

  // class-banded bag-of-words features
  const int band = d / c;
  std::vector<std::set<int>> tokens(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int cls = labels[static_cast<std::size_t>(i)];
    const int band_lo = cls * band;
    for (int t = 0; t < spec.tokens_per_node; ++t) {
      int dim;
      if (rng.next_double() < spec.on_topic_fraction) {
        dim = band_lo + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(band)));
      } else {
        dim = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(d)));
      }
      tokens[static_cast<std::size_t>(i)].insert(dim);
    }
  }

  // exactly n_edges distinct undirected edges, mostly intra-class
  std::set<std::pair<int, int>> edges;
  while (static_cast<std::int64_t>(edges.size()) < spec.n_edges) {
    const int u = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    int v;
    if (rng.next_double() < spec.intra_class_edge_fraction) {
      const auto& bucket = members[static_cast<std::size_t>(labels[static_cast<std::size_t>(u)])];
      v = bucket[static_cast<std::size_t>(rng.bounded(static_cast<std::uint64_t>(bucket.size())))];
    } else {
      v = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    }
    if (u == v) continue;
    edges.insert({std::min(u, v), std::max(u, v)});
  }

  RawDataset out;
  out.content = out_dir / (spec.name + ".content");
  out.edges = out_dir / (spec.name + ".cites");

  {
    std::ofstream f(out.content);
    if (!f) throw FsncError("cannot write " + out.content.string());
    std::vector<char> row(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
      std::fill(row.begin(), row.end(), '0');
      for (int dim : tokens[static_cast<std::size_t>(i)]) row[static_cast<std::size_t>(dim)] = '1';
      f << "n" << i;
      for (int j = 0; j < d; ++j) f << '\t' << row[static_cast<std::size_t>(j)];
      f << "\ttopic_" << labels[static_cast<std::size_t>(i)] << "\n";
    }
  }
  {
    std::ofstream f(out.edges);
    if (!f) throw FsncError("cannot write " + out.edges.string());
    for (const auto& [u, v] : edges) f << "n" << u << "\tn" << v << "\n";
  }
  return out;
}

}  // namespace fsnc
