#include <doctest.h>

#include <map>
#include <memory>
#include <set>

#include "fsnc/episodes.hpp"
#include "helpers.hpp"

using namespace fsnc;
using namespace fsnc::testing;

namespace {

std::shared_ptr<const Graph> class_blocks_graph(int classes, int per_class) {
  std::vector<int> labels;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) labels.push_back(c);
  }
  return std::make_shared<const Graph>(
      toy_graph(classes * per_class, {}, std::move(labels), classes));
}

SplitView whole_graph_view(std::shared_ptr<const Graph> g) {
  std::vector<int> train, dev, test;
  for (int c = 0; c < g->n_classes; ++c) {
    if (c < g->n_classes - 2) {
      train.push_back(c);
    } else if (c < g->n_classes - 1) {
      dev.push_back(c);
    } else {
      test.push_back(c);
    }
  }
  const ClassSplit split{train, dev, test};
  return build_view(std::move(g), split, Setting::transductive, Partition::train);
}

void check_balance(const Episode& ep, const EpisodeSpec& spec) {
  REQUIRE(static_cast<int>(ep.class_map.size()) == spec.n_way);
  REQUIRE(static_cast<int>(ep.support.size()) == spec.n_way * spec.k_shot);
  REQUIRE(static_cast<int>(ep.query.size()) == spec.n_way * spec.q_query);
  std::map<int, int> sup_counts, qry_counts;
  for (const auto& [node, label] : ep.support) ++sup_counts[label];
  for (const auto& [node, label] : ep.query) ++qry_counts[label];
  for (int l = 0; l < spec.n_way; ++l) {
    CHECK(sup_counts[l] == spec.k_shot);
    CHECK(qry_counts[l] == spec.q_query);
  }
}

}  // namespace

TEST_CASE("forced selection: 2 classes with exactly K+Q nodes each") {
  const EpisodeSpec spec{2, 2, 3};
  const auto g = class_blocks_graph(4, 5);  // train classes 0,1 have exactly 5 = K+Q nodes
  SplitView view = whole_graph_view(g);

  RngStream rng(3);
  const Episode ep = sample_episode(view, spec, rng);
  check_balance(ep, spec);

  // every node of both chosen classes appears exactly once
  std::set<int> used;
  for (const auto& [node, label] : ep.support) CHECK(used.insert(node).second);
  for (const auto& [node, label] : ep.query) CHECK(used.insert(node).second);
  CHECK(used.size() == 10);
}

TEST_CASE("insufficient classes is an error") {
  const auto g = class_blocks_graph(6, 4);
  SplitView view = whole_graph_view(g);  // 4 train classes
  RngStream rng(4);
  CHECK_THROWS_WITH_AS(sample_episode(view, EpisodeSpec{5, 1, 10}, rng),
                       doctest::Contains("insufficient classes"), FsncError);
}

TEST_CASE("classes below K+Q are filtered out before sampling") {
  // 3 train classes but one has too few nodes for K+Q=6
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(0);
  for (int i = 0; i < 10; ++i) labels.push_back(1);
  for (int i = 0; i < 3; ++i) labels.push_back(2);
  labels.push_back(3);
  labels.push_back(4);
  auto g = std::make_shared<const Graph>(toy_graph(25, {}, labels, 5));
  const ClassSplit split{{0, 1, 2}, {3}, {4}};
  SplitView view = build_view(g, split, Setting::transductive, Partition::train);

  RngStream rng(5);
  const EpisodeSpec spec{2, 1, 5};
  for (int i = 0; i < 20; ++i) {
    const Episode ep = sample_episode(view, spec, rng);
    for (int cls : ep.class_map) CHECK(cls != 2);
  }
  CHECK_THROWS_AS(sample_episode(view, EpisodeSpec{3, 1, 5}, rng), FsncError);
}

TEST_CASE("support frequency matches the enumerated choice tree") {
  // 2 classes, 3 nodes each, spec (2,1,1): the sampler draws an ordered
  // pair per class; enumerating all 3*2 equally likely ordered pairs puts
  // each node first (support) in 2 of 6 outcomes = 1/3.
  double expected = -1.0;
  {
    int first_count = 0, total = 0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        ++total;
        if (a == 0) ++first_count;  // probability node 0 lands in support
      }
    }
    expected = static_cast<double>(first_count) / static_cast<double>(total);
  }
  CHECK(expected == doctest::Approx(1.0 / 3.0));

  const auto g = class_blocks_graph(4, 3);  // train classes 0,1 with 3 nodes each
  SplitView view = whole_graph_view(g);
  const EpisodeSpec spec{2, 1, 1};

  std::map<int, int> support_hits;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    RngStream rng = RngStream::substream(99, static_cast<std::uint64_t>(i));
    const Episode ep = sample_episode(view, spec, rng);
    for (const auto& [node, label] : ep.support) ++support_hits[node];
  }
  for (int node = 0; node < 6; ++node) {
    const double freq = static_cast<double>(support_hits[node]) / samples;
    CHECK(freq == doctest::Approx(expected).epsilon(0.06));  // 1/3 +- 0.02
    CHECK(std::abs(freq - expected) <= 0.02);
  }
}

TEST_CASE("episode labels map back to true classes") {
  RngStream outer(12);
  const auto g = class_blocks_graph(5, 8);
  SplitView view = whole_graph_view(g);
  const EpisodeSpec spec{3, 2, 2};
  for (int i = 0; i < 50; ++i) {
    RngStream rng = RngStream::substream(7, static_cast<std::uint64_t>(i));
    const Episode ep = sample_episode(view, spec, rng);
    check_balance(ep, spec);
    for (const auto& [node, label] : ep.support) {
      CHECK(view.graph->labels[static_cast<std::size_t>(node)] ==
            ep.class_map[static_cast<std::size_t>(label)]);
    }
    for (const auto& [node, label] : ep.query) {
      CHECK(view.graph->labels[static_cast<std::size_t>(node)] ==
            ep.class_map[static_cast<std::size_t>(label)]);
    }
    // support / query node-disjoint
    std::set<int> sup;
    for (const auto& [node, label] : ep.support) sup.insert(node);
    for (const auto& [node, label] : ep.query) CHECK(sup.count(node) == 0);
  }
}

TEST_CASE("sample_batch: count zero gives an empty list") {
  const auto g = class_blocks_graph(4, 4);
  SplitView view = whole_graph_view(g);
  CHECK(sample_batch(view, EpisodeSpec{2, 1, 1}, 0, 5).empty());
}

TEST_CASE("sample_batch is deterministic") {
  const auto g = class_blocks_graph(4, 6);
  SplitView view = whole_graph_view(g);
  const EpisodeSpec spec{2, 1, 2};
  const auto a = sample_batch(view, spec, 40, 123);
  const auto b = sample_batch(view, spec, 40, 123);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].support == b[i].support);
    CHECK(a[i].query == b[i].query);
    CHECK(a[i].class_map == b[i].class_map);
  }
  // and each episode depends only on its own index
  const auto c = sample_batch(view, spec, 10, 123);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i].support == a[i].support);
}

TEST_CASE("batch of 100 2-way 5-shot 10-query episodes has the right shape") {
  const auto g = class_blocks_graph(4, 40);
  SplitView view = whole_graph_view(g);
  const auto batch = sample_batch(view, EpisodeSpec{2, 5, 10}, 100, 2024);
  REQUIRE(batch.size() == 100);
  for (const auto& ep : batch) {
    CHECK(ep.support.size() == 10);
    CHECK(ep.query.size() == 20);
  }
}

TEST_CASE("episodes roundtrip through the JSONL manifest") {
  const auto g = class_blocks_graph(4, 6);
  SplitView view = whole_graph_view(g);
  const auto batch = sample_batch(view, EpisodeSpec{2, 2, 1}, 12, 8);

  TempDir tmp("jsonl");
  const auto path = tmp.path() / "episodes.jsonl";
  write_episodes_jsonl(path, batch, view);
  const auto loaded = read_episodes_jsonl(path, view);
  REQUIRE(loaded.size() == batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(loaded[i].support == batch[i].support);
    CHECK(loaded[i].query == batch[i].query);
    CHECK(loaded[i].class_map == batch[i].class_map);
  }
}
