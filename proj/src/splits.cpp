#include "fsnc/splits.hpp"

#include <algorithm>
#include <charconv>

#include "fsnc/rng.hpp"

namespace fsnc {

std::string to_string(Setting s) {
  return s == Setting::transductive ? "transductive" : "inductive";
}

std::string to_string(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::dev: return "dev";
    default: return "test";
  }
}

Setting setting_from_string(const std::string& s) {
  if (s == "transductive") return Setting::transductive;
  if (s == "inductive") return Setting::inductive;
  throw FsncError("unknown setting: \"" + s + "\" (expected transductive or inductive)");
}

Partition partition_from_string(const std::string& s) {
  if (s == "train") return Partition::train;
  if (s == "dev") return Partition::dev;
  if (s == "test") return Partition::test;
  throw FsncError("unknown partition: \"" + s + "\" (expected train, dev or test)");
}

const std::vector<int>& ClassSplit::classes(Partition p) const {
  switch (p) {
    case Partition::train: return train_classes;
    case Partition::dev: return dev_classes;
    default: return test_classes;
  }
}

void ClassSplit::validate(int n_classes) const {
  if (train_classes.empty() || dev_classes.empty() || test_classes.empty()) {
    throw FsncError("class split: every partition needs at least one class");
  }
  std::vector<int> all;
  for (const auto* part : {&train_classes, &dev_classes, &test_classes}) {
    all.insert(all.end(), part->begin(), part->end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw FsncError("class split: partitions overlap");
  }
  for (int c : all) {
    if (c < 0 || c >= n_classes) {
      throw FsncError("class split: class id " + std::to_string(c) + " out of range");
    }
  }
}

SplitSeed SplitSeed::parse(const std::string& text) {
  if (text == "fixed") return fixed_assignment();
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw FsncError("split seed must be \"fixed\" or an unsigned integer, got \"" + text + "\"");
  }
  return shuffled(v);
}

std::string SplitSeed::to_string() const {
  return fixed ? "fixed" : std::to_string(value);
}

ClassSplit split_classes(const Graph& g, int train_size, int dev_size, int test_size,
                         const SplitSeed& seed) {
  if (train_size <= 0 || dev_size <= 0 || test_size <= 0) {
    throw FsncError("class split sizes must be positive");
  }
  if (train_size + dev_size + test_size != g.n_classes) {
    throw FsncError("class split sizes sum to " + std::to_string(train_size + dev_size + test_size) +
                    " but the graph has " + std::to_string(g.n_classes) + " classes");
  }
  std::vector<int> ids(static_cast<std::size_t>(g.n_classes));
  for (int c = 0; c < g.n_classes; ++c) ids[static_cast<std::size_t>(c)] = c;
  if (!seed.fixed) {
    RngStream rng(seed.value);
    rng.shuffle(ids);
  }
  ClassSplit out;
  out.train_classes.assign(ids.begin(), ids.begin() + train_size);
  out.dev_classes.assign(ids.begin() + train_size, ids.begin() + train_size + dev_size);
  out.test_classes.assign(ids.begin() + train_size + dev_size, ids.end());
  for (auto* part : {&out.train_classes, &out.dev_classes, &out.test_classes}) {
    std::sort(part->begin(), part->end());
  }
  return out;
}

namespace {

SplitView finish_view(SplitView view) {
  const Graph& g = *view.graph;
  for (int c : view.class_ids) view.nodes_by_class.emplace(c, std::vector<int>{});
  for (int i = 0; i < g.n_nodes; ++i) {
    const auto it = view.nodes_by_class.find(g.labels[static_cast<std::size_t>(i)]);
    if (it == view.nodes_by_class.end()) continue;
    it->second.push_back(i);
    view.partition_nodes.push_back(i);
  }
  return view;
}

}  // namespace

SplitView build_view(std::shared_ptr<const Graph> g, const ClassSplit& split, Setting setting,
                     Partition partition) {
  g->validate(false);
  split.validate(g->n_classes);

  SplitView view;
  view.setting = setting;
  view.partition = partition;
  view.class_ids = split.classes(partition);
  std::sort(view.class_ids.begin(), view.class_ids.end());

  std::vector<int> members;
  for (int i = 0; i < g->n_nodes; ++i) {
    if (std::binary_search(view.class_ids.begin(), view.class_ids.end(),
                           g->labels[static_cast<std::size_t>(i)])) {
      members.push_back(i);
    }
  }
  if (members.empty()) {
    throw FsncError("partition " + to_string(partition) + ": its classes label zero nodes");
  }

  if (setting == Setting::transductive) {
    view.graph = std::move(g);
    view.normalized = std::make_shared<NormalizedAdjacency>(gcn_normalize(*view.graph));
    view.to_global.resize(static_cast<std::size_t>(view.graph->n_nodes));
    for (int i = 0; i < view.graph->n_nodes; ++i) view.to_global[static_cast<std::size_t>(i)] = i;
    view.to_local = view.to_global;
  } else {
    auto [sub, mapping] = induced_subgraph(*g, members);
    view.graph = std::make_shared<const Graph>(std::move(sub));
    view.normalized = std::make_shared<NormalizedAdjacency>(gcn_normalize(*view.graph));
    view.to_local = std::move(mapping);
    view.to_global = members;
  }
  return finish_view(std::move(view));
}

const SplitView& ViewSet::view(Partition p) const {
  switch (p) {
    case Partition::train: return train;
    case Partition::dev: return dev;
    default: return test;
  }
}

ViewSet build_views(std::shared_ptr<const Graph> g, const ClassSplit& split, Setting setting) {
  ViewSet set{build_view(g, split, setting, Partition::train),
              build_view(g, split, setting, Partition::dev),
              build_view(g, split, setting, Partition::test)};
  if (setting == Setting::transductive) {
    // all partitions read the same full-graph propagation structure
    set.dev.graph = set.train.graph;
    set.test.graph = set.train.graph;
    set.dev.normalized = set.train.normalized;
    set.test.normalized = set.train.normalized;
  }
  return set;
}

std::int64_t count_cross_partition_edges(const Graph& g, const ClassSplit& split) {
  auto part_of = [&](int node) -> int {
    const int label = g.labels[static_cast<std::size_t>(node)];
    for (Partition p : {Partition::train, Partition::dev, Partition::test}) {
      const auto& cls = split.classes(p);
      if (std::find(cls.begin(), cls.end(), label) != cls.end()) return static_cast<int>(p);
    }
    return -1;
  };
  std::int64_t crossing = 0;
  for (int u = 0; u < g.n_nodes; ++u) {
    for (std::int64_t k = g.adjacency.indptr[static_cast<std::size_t>(u)];
         k < g.adjacency.indptr[static_cast<std::size_t>(u) + 1]; ++k) {
      const int v = g.adjacency.indices[static_cast<std::size_t>(k)];
      if (u < v && part_of(u) != part_of(v)) ++crossing;
    }
  }
  return crossing;
}

}  // namespace fsnc
