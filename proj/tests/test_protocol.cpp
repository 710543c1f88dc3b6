#include <doctest.h>

#include <memory>

#include "fsnc/protocol.hpp"
#include "helpers.hpp"

using namespace fsnc;
using namespace fsnc::testing;

namespace {

/// Mock driver with a predetermined dev-accuracy sequence. The "parameters"
/// are an epoch counter; the test accuracy encodes which snapshot was
/// restored, so tests can verify best-snapshot semantics exactly.
class ScriptedDriver : public MethodDriver {
 public:
  explicit ScriptedDriver(std::vector<double> dev_sequence) : dev_sequence_(std::move(dev_sequence)) {}

  void initialize(int) override {
    version_ = 0;
    snapshot_ = 0;
    dev_calls_ = 0;
    restored_ = false;
  }
  void train_epoch(int, int) override { ++version_; }
  double evaluate_dev(int, int round) override {
    ++dev_calls_;
    if (static_cast<std::size_t>(round) < dev_sequence_.size()) {
      return dev_sequence_[static_cast<std::size_t>(round)];
    }
    return dev_sequence_.empty() ? 0.0 : dev_sequence_.back();
  }
  double evaluate_test(int) override {
    REQUIRE(restored_);  // test must run on the restored snapshot
    return 1000.0 + static_cast<double>(version_);
  }
  void snapshot_best() override { snapshot_ = version_; }
  void restore_best() override {
    version_ = snapshot_;
    restored_ = true;
  }

  int dev_calls() const { return dev_calls_; }

 private:
  std::vector<double> dev_sequence_;
  int version_ = 0;
  int snapshot_ = 0;
  int dev_calls_ = 0;
  bool restored_ = false;
};

ProtocolConfig scripted_config(int eval_interval, int patience, int max_epochs) {
  ProtocolConfig cfg;
  cfg.eval_interval = eval_interval;
  cfg.patience = patience;
  cfg.max_epochs = max_epochs;
  cfg.tasks_per_eval = 1;
  cfg.repeats = 1;
  cfg.method.id = MethodId::protonet;
  cfg.method.backbone = Backbone::mlp;
  return cfg;
}

std::shared_ptr<const Graph> small_dataset(std::uint64_t seed) {
  // 6 classes x 30 nodes, separable features plus noise, some random edges
  RngStream rng(seed);
  const int classes = 6, per_class = 30;
  const int n = classes * per_class;
  std::vector<int> labels;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) labels.push_back(c);
  }
  rng.shuffle(labels);
  DenseMatrix feats(n, 10);
  for (int i = 0; i < n; ++i) {
    feats.at(i, labels[static_cast<std::size_t>(i)]) = 2.0;
    for (int j = 0; j < 10; ++j) feats.at(i, j) += rng.uniform(-0.3, 0.3);
  }
  std::vector<std::pair<int, int>> edges;
  for (int e = 0; e < 300; ++e) {
    const int u = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    const int v = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    if (u != v) edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return std::make_shared<const Graph>(
      make_graph(n, classes, edges, FeatureMatrix(std::move(feats)), std::move(labels)));
}

ProtocolConfig small_run_config(MethodId id, Setting setting, std::uint64_t seed) {
  ProtocolConfig cfg;
  cfg.eval_interval = 5;
  cfg.tasks_per_eval = 10;
  cfg.patience = 2;
  cfg.max_epochs = 30;
  cfg.repeats = 2;
  cfg.spec = EpisodeSpec{2, 2, 3};
  cfg.setting = setting;
  cfg.method.id = id;
  cfg.method.backbone = MethodConfig::default_backbone(id);
  cfg.method.hidden = 12;
  cfg.method.embedding = 6;
  cfg.master_seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("scripted trace: plateau after three improvements") {
  // EI=10, E=3: rounds at epochs 10,20,30 improve (snapshots v=10,20,30),
  // rounds at 40,50,60 fail -> patience hits 3 at epoch 60
  ScriptedDriver driver({0.5, 0.6, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7});
  const ProtocolConfig cfg = scripted_config(10, 3, 200);
  const RepeatResult res = run_single_repeat(driver, cfg, 0);
  CHECK(res.stop_epoch == 60);
  CHECK(res.best_val_accuracy == 0.7);
  CHECK(res.test_accuracy == 1030.0);  // snapshot taken at epoch 30
}

TEST_CASE("scripted trace: monotone improvement runs to the epoch cap") {
  std::vector<double> seq;
  for (int r = 0; r < 20; ++r) seq.push_back(0.04 * (r + 1));
  ScriptedDriver driver(seq);
  const ProtocolConfig cfg = scripted_config(10, 3, 200);
  const RepeatResult res = run_single_repeat(driver, cfg, 0);
  CHECK(res.stop_epoch == 200);
  CHECK(res.best_val_accuracy == doctest::Approx(0.8));
  CHECK(res.test_accuracy == 1200.0);  // best snapshot is the last epoch
  CHECK(driver.dev_calls() == 20);
}

TEST_CASE("scripted trace: ties do not reset patience") {
  // 0.9 at round 0 is the only improvement; later 0.9s tie and fail
  ScriptedDriver driver({0.9, 0.8, 0.8, 0.9, 0.9, 0.9});
  const ProtocolConfig cfg = scripted_config(10, 3, 200);
  const RepeatResult res = run_single_repeat(driver, cfg, 0);
  CHECK(res.stop_epoch == 40);
  CHECK(res.best_val_accuracy == 0.9);
  CHECK(res.test_accuracy == 1010.0);
}

TEST_CASE("boundary schedule: max_epochs == eval_interval gives exactly one round") {
  ScriptedDriver driver({0.5});
  const ProtocolConfig cfg = scripted_config(10, 1, 10);
  const RepeatResult res = run_single_repeat(driver, cfg, 0);
  CHECK(driver.dev_calls() == 1);
  CHECK(res.stop_epoch == 10);
  CHECK(res.test_accuracy == 1010.0);
}

TEST_CASE("patience never exceeds its limit") {
  // all-zero accuracies never improve on a_best = 0; stop at E rounds
  ScriptedDriver driver(std::vector<double>(50, 0.0));
  const ProtocolConfig cfg = scripted_config(5, 4, 1000);
  const RepeatResult res = run_single_repeat(driver, cfg, 0);
  CHECK(res.stop_epoch == 4 * 5);
  CHECK(driver.dev_calls() == 4);
  CHECK(res.best_val_accuracy == 0.0);
  // no snapshot was ever taken; test falls back to the initialization
  CHECK(res.test_accuracy == 1000.0);
}

TEST_CASE("constant classifier scores exactly 1/N on every balanced episode") {
  const auto g = small_dataset(1);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  const SplitView dev = build_view(g, split, Setting::inductive, Partition::dev);
  const EpisodeSpec spec{2, 3, 4};

  std::vector<double> per_episode;
  const double mean = evaluate_tasks_with(dev, spec, 50, 77, [&](const Episode& ep) {
    EpisodeResult res;
    int correct = 0;
    for (const auto& [node, label] : ep.query) {
      res.predictions.push_back(0);
      if (label == 0) ++correct;
    }
    res.accuracy = static_cast<double>(correct) / static_cast<double>(ep.query.size());
    per_episode.push_back(res.accuracy);
    return res;
  });
  for (double a : per_episode) CHECK(a == 0.5);
  CHECK(mean == 0.5);
}

TEST_CASE("an oracle that reads true labels scores exactly 1") {
  const auto g = small_dataset(2);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  const SplitView dev = build_view(g, split, Setting::inductive, Partition::dev);

  const double mean = evaluate_tasks_with(dev, EpisodeSpec{2, 1, 5}, 20, 5, [](const Episode& ep) {
    EpisodeResult res;
    for (const auto& [node, label] : ep.query) res.predictions.push_back(label);
    res.accuracy = 1.0;
    return res;
  });
  CHECK(mean == 1.0);
}

TEST_CASE("single-task evaluation returns that episode's accuracy") {
  const auto g = small_dataset(3);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  const SplitView dev = build_view(g, split, Setting::inductive, Partition::dev);
  double captured = -1.0;
  const double mean = evaluate_tasks_with(dev, EpisodeSpec{2, 1, 3}, 1, 9, [&](const Episode& ep) {
    EpisodeResult res;
    int correct = 0;
    for (const auto& [node, label] : ep.query) {
      res.predictions.push_back(0);
      if (label == 0) ++correct;
    }
    res.accuracy = static_cast<double>(correct) / static_cast<double>(ep.query.size());
    captured = res.accuracy;
    return res;
  });
  CHECK(mean == captured);
}

TEST_CASE("evaluation is invariant to the jobs count") {
  const auto g = small_dataset(4);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  const ViewSet views = build_views(g, split, Setting::inductive);
  const MethodConfig cfg = [] {
    MethodConfig m;
    m.id = MethodId::protonet;
    m.backbone = Backbone::mlp;
    m.hidden = 12;
    m.embedding = 6;
    return m;
  }();
  const ParamSet params = init_method_params(cfg, g->n_features(), 3, 2, 123);

  const double serial = evaluate_tasks(params, views.dev, EpisodeSpec{2, 2, 3}, 40, 7, cfg, 1);
  const double parallel = evaluate_tasks(params, views.dev, EpisodeSpec{2, 2, 3}, 40, 7, cfg, 4);
  CHECK(serial == parallel);
}

TEST_CASE("run_protocol end to end: deterministic and jobs-invariant") {
  const auto g = small_dataset(5);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  const ProtocolConfig cfg = small_run_config(MethodId::protonet, Setting::inductive, 99);

  const RunReport a = run_protocol(g, split, cfg);
  const RunReport b = run_protocol(g, split, cfg);
  ProtocolConfig parallel_cfg = cfg;
  parallel_cfg.jobs = 4;
  const RunReport c = run_protocol(g, split, parallel_cfg);

  REQUIRE(a.repeats.size() == 2);
  for (std::size_t i = 0; i < a.repeats.size(); ++i) {
    CHECK(a.repeats[i].test_accuracy == b.repeats[i].test_accuracy);
    CHECK(a.repeats[i].test_accuracy == c.repeats[i].test_accuracy);
    CHECK(a.repeats[i].stop_epoch == c.repeats[i].stop_epoch);
    CHECK(a.repeats[i].test_accuracy >= 0.0);
    CHECK(a.repeats[i].test_accuracy <= 1.0);
    CHECK(a.repeats[i].stop_epoch <= cfg.max_epochs);
  }
  CHECK(a.mean_accuracy == c.mean_accuracy);
  CHECK(a.ci95 == c.ci95);
}

TEST_CASE("repeats are isolated: each repeat's result is order-independent") {
  const auto g = small_dataset(6);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  ProtocolConfig cfg = small_run_config(MethodId::protonet, Setting::inductive, 17);
  cfg.repeats = 3;

  const RunReport all = run_protocol(g, split, cfg);

  // repeat 0 alone (T=1) reproduces its slot: seeds are keyed by repeat
  // index, not by global execution order
  ProtocolConfig one = cfg;
  one.repeats = 1;
  const RunReport solo = run_protocol(g, split, one);
  CHECK(solo.repeats[0].test_accuracy == all.repeats[0].test_accuracy);
  CHECK(solo.repeats[0].stop_epoch == all.repeats[0].stop_epoch);

  // scrambled execution order via parallel repeats changes nothing
  ProtocolConfig jobs_cfg = cfg;
  jobs_cfg.jobs = 3;
  const RunReport parallel = run_protocol(g, split, jobs_cfg);
  for (std::size_t i = 0; i < all.repeats.size(); ++i) {
    CHECK(all.repeats[i].repeat == static_cast<int>(i));
    CHECK(all.repeats[i].test_accuracy == parallel.repeats[i].test_accuracy);
  }
}

TEST_CASE("setting invariance: mlp-backbone methods match across settings bit for bit") {
  const auto g = small_dataset(7);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  for (const MethodId id : {MethodId::protonet, MethodId::maml}) {
    ProtocolConfig cfg = small_run_config(id, Setting::transductive, 4242);
    if (id == MethodId::maml) {
      cfg.method.inner_steps = 3;  // keep the toy run quick
    }
    const RunReport trans = run_protocol(g, split, cfg);
    cfg.setting = Setting::inductive;
    const RunReport ind = run_protocol(g, split, cfg);
    REQUIRE(trans.repeats.size() == ind.repeats.size());
    for (std::size_t i = 0; i < trans.repeats.size(); ++i) {
      CHECK(trans.repeats[i].test_accuracy == ind.repeats[i].test_accuracy);
      CHECK(trans.repeats[i].best_val_accuracy == ind.repeats[i].best_val_accuracy);
      CHECK(trans.repeats[i].stop_epoch == ind.repeats[i].stop_epoch);
    }
  }
}

TEST_CASE("ignn accuracies differ across settings when edges matter") {
  // sanity counterpoint to the invariance test: the gcn backbone sees edges
  const auto g = small_dataset(8);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  ProtocolConfig cfg = small_run_config(MethodId::ignn, Setting::transductive, 31);
  cfg.max_epochs = 10;
  cfg.patience = 1;
  const RunReport trans = run_protocol(g, split, cfg);
  cfg.setting = Setting::inductive;
  const RunReport ind = run_protocol(g, split, cfg);
  bool any_different = false;
  for (std::size_t i = 0; i < trans.repeats.size(); ++i) {
    if (trans.repeats[i].test_accuracy != ind.repeats[i].test_accuracy) any_different = true;
  }
  CHECK(any_different);
}

TEST_CASE("meta_gnn runs the full protocol with graph-aware adaptation") {
  const auto g = small_dataset(10);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  ProtocolConfig cfg = small_run_config(MethodId::meta_gnn, Setting::inductive, 5);
  cfg.method.inner_steps = 2;
  cfg.max_epochs = 10;
  cfg.patience = 1;
  cfg.tasks_per_eval = 5;
  cfg.repeats = 1;

  const RunReport report = run_protocol(g, split, cfg);
  CHECK(report.repeats.size() == 1);
  CHECK(report.repeats[0].test_accuracy >= 0.0);
  CHECK(report.repeats[0].test_accuracy <= 1.0);
}

TEST_CASE("run_protocol hands back per-repeat best snapshots on request") {
  const auto g = small_dataset(11);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  ProtocolConfig cfg = small_run_config(MethodId::protonet, Setting::inductive, 8);
  cfg.repeats = 2;

  std::vector<ParamSet> best;
  run_protocol(g, split, cfg, &best);
  REQUIRE(best.size() == 2);
  for (const ParamSet& p : best) {
    CHECK(p.size() == 2);  // encoder W1, W2
    CHECK(p.at("enc.W1").rows == g->n_features());
  }
  // independent initializations per repeat
  CHECK_FALSE(best[0].equals(best[1]));
}

TEST_CASE("run_protocol surfaces infeasible specs before training") {
  const auto g = small_dataset(9);
  const ClassSplit split = split_classes(*g, 2, 2, 2, SplitSeed::fixed_assignment());
  ProtocolConfig cfg = small_run_config(MethodId::protonet, Setting::inductive, 1);
  cfg.spec.n_way = 5;  // dev partition has only 2 classes
  CHECK_THROWS_AS(run_protocol(g, split, cfg), FsncError);
}
