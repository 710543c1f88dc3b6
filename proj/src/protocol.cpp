#include "fsnc/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <thread>

namespace fsnc {

void ProtocolConfig::validate() const {
  if (eval_interval < 1) throw FsncError("protocol: eval_interval must be >= 1");
  if (tasks_per_eval < 1) throw FsncError("protocol: tasks_per_eval must be >= 1");
  if (patience < 1) throw FsncError("protocol: patience must be >= 1");
  if (max_epochs < eval_interval) throw FsncError("protocol: max_epochs must be >= eval_interval");
  if (repeats < 1) throw FsncError("protocol: repeats must be >= 1");
  if (jobs < 1) throw FsncError("protocol: jobs must be >= 1");
  spec.validate();
  method.validate();
}

namespace seeds {

namespace {
// stream tags keep the four seed families disjoint
constexpr std::uint64_t kInit = 0x496e6974ULL;
constexpr std::uint64_t kTrain = 0x547261696eULL;
constexpr std::uint64_t kDev = 0x446576ULL;
constexpr std::uint64_t kTest = 0x54657374ULL;
}  // namespace

std::uint64_t init_seed(std::uint64_t master, int repeat) {
  return mix_seed({master, kInit, static_cast<std::uint64_t>(repeat)});
}
std::uint64_t train_seed(std::uint64_t master, int repeat, int epoch) {
  return mix_seed({master, kTrain, static_cast<std::uint64_t>(repeat), static_cast<std::uint64_t>(epoch)});
}
std::uint64_t dev_seed(std::uint64_t master, int repeat, int round) {
  return mix_seed({master, kDev, static_cast<std::uint64_t>(repeat), static_cast<std::uint64_t>(round)});
}
std::uint64_t test_seed(std::uint64_t master, int repeat) {
  return mix_seed({master, kTest, static_cast<std::uint64_t>(repeat)});
}

}  // namespace seeds

RepeatResult run_single_repeat(MethodDriver& driver, const ProtocolConfig& cfg, int repeat) {
  driver.initialize(repeat);
  double a_best = 0.0;
  int fails = 0;  // consecutive non-improving validation rounds
  int round = 0;
  int stop_epoch = cfg.max_epochs;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    driver.train_epoch(repeat, epoch);
    if (epoch % cfg.eval_interval == 0) {
      const double a = driver.evaluate_dev(repeat, round);
      ++round;
      if (a > a_best) {
        a_best = a;
        fails = 0;
        driver.snapshot_best();
      } else {
        ++fails;
      }
    }
    if (fails == cfg.patience) {
      stop_epoch = epoch;
      break;
    }
  }
  driver.restore_best();

  RepeatResult res;
  res.repeat = repeat;
  res.best_val_accuracy = a_best;
  res.stop_epoch = stop_epoch;
  res.test_accuracy = driver.evaluate_test(repeat);
  return res;
}

namespace {

void run_indexed(int count, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  const int n_threads = std::min(jobs, count);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    threads.emplace_back([&, t]() {
      try {
        for (int i = t; i < count; i += n_threads) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

double evaluate_tasks_with(const SplitView& view, const EpisodeSpec& spec, int count,
                           std::uint64_t seed, const EpisodeEvaluator& evaluate, int jobs) {
  if (count <= 0) return 0.0;
  std::vector<double> accuracies(static_cast<std::size_t>(count), 0.0);
  run_indexed(count, jobs, [&](int i) {
    RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(i));
    const Episode ep = sample_episode(view, spec, rng);
    accuracies[static_cast<std::size_t>(i)] = evaluate(ep).accuracy;
  });
  // reduce in episode-index order so the mean is jobs-invariant
  double sum = 0.0;
  for (double a : accuracies) sum += a;
  return sum / static_cast<double>(count);
}

double evaluate_tasks(const ParamSet& frozen, const SplitView& view, const EpisodeSpec& spec,
                      int count, std::uint64_t seed, const MethodConfig& method, int jobs) {
  if (method.id == MethodId::ignn || method.id == MethodId::protonet) {
    const DenseMatrix emb = embed_view(view, method.backbone, frozen);
    return evaluate_tasks_with(
        view, spec, count, seed,
        [&](const Episode& ep) { return evaluate_episode(method, view, ep, frozen, &emb); }, jobs);
  }
  return evaluate_tasks_with(
      view, spec, count, seed,
      [&](const Episode& ep) { return evaluate_episode(method, view, ep, frozen, nullptr); }, jobs);
}

namespace {

/// Production driver: real parameters, real training, real evaluation.
class StandardDriver : public MethodDriver {
 public:
  StandardDriver(const ViewSet& views, const ProtocolConfig& cfg, int eval_jobs)
      : views_(views), cfg_(cfg), eval_jobs_(eval_jobs) {}

  void initialize(int repeat) override {
    const int n_train_classes = static_cast<int>(views_.train.class_ids.size());
    params_ = init_method_params(cfg_.method, views_.train.graph->n_features(), n_train_classes,
                                 cfg_.spec.n_way, seeds::init_seed(cfg_.master_seed, repeat));
    opt_ = make_adam(params_, cfg_.method.outer);
    best_params_ = params_;  // epoch-0 fallback if no round ever improves
  }

  void train_epoch(int repeat, int epoch) override {
    train_step(cfg_.method, views_, cfg_.spec, params_, opt_,
               seeds::train_seed(cfg_.master_seed, repeat, epoch));
  }

  double evaluate_dev(int repeat, int round) override {
    return evaluate_tasks(params_, views_.dev, cfg_.spec, cfg_.tasks_per_eval,
                          seeds::dev_seed(cfg_.master_seed, repeat, round), cfg_.method, eval_jobs_);
  }

  double evaluate_test(int repeat) override {
    return evaluate_tasks(params_, views_.test, cfg_.spec, cfg_.tasks_per_eval,
                          seeds::test_seed(cfg_.master_seed, repeat), cfg_.method, eval_jobs_);
  }

  void snapshot_best() override { best_params_ = params_; }
  void restore_best() override { params_ = best_params_; }

  ParamSet take_params() { return std::move(params_); }

 private:
  const ViewSet& views_;
  const ProtocolConfig& cfg_;
  int eval_jobs_;
  ParamSet params_;
  ParamSet best_params_;
  OptimizerState opt_;
};

}  // namespace

namespace {
int eligible_class_count(const SplitView& view, const EpisodeSpec& spec) {
  int eligible = 0;
  for (const auto& [cls, nodes] : view.nodes_by_class) {
    if (static_cast<int>(nodes.size()) >= spec.k_shot + spec.q_query) ++eligible;
  }
  return eligible;
}

}  // namespace

void check_view_feasibility(const ViewSet& views, const ProtocolConfig& cfg) {
  std::vector<Partition> episodic = {Partition::dev, Partition::test};
  if (cfg.method.id != MethodId::ignn) episodic.push_back(Partition::train);
  for (Partition p : episodic) {
    const SplitView& view = views.view(p);
    const int eligible = eligible_class_count(view, cfg.spec);
    if (eligible < cfg.spec.n_way) {
      throw FsncError("partition " + to_string(p) + " has only " + std::to_string(eligible) +
                      " classes with >= " + std::to_string(cfg.spec.k_shot + cfg.spec.q_query) +
                      " nodes; " + std::to_string(cfg.spec.n_way) + "-way episodes are impossible");
    }
  }
}

RunReport run_protocol(std::shared_ptr<const Graph> graph, const ClassSplit& split,
                       const ProtocolConfig& cfg, std::vector<ParamSet>* out_params) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const ViewSet views = build_views(std::move(graph), split, cfg.setting);
  check_view_feasibility(views, cfg);

  const int repeat_jobs = std::min(cfg.jobs, cfg.repeats);
  const int eval_jobs = repeat_jobs > 1 ? 1 : cfg.jobs;

  RunReport report;
  report.repeats.resize(static_cast<std::size_t>(cfg.repeats));
  if (out_params != nullptr) out_params->resize(static_cast<std::size_t>(cfg.repeats));

  run_indexed(cfg.repeats, repeat_jobs, [&](int repeat) {
    StandardDriver driver(views, cfg, eval_jobs);
    report.repeats[static_cast<std::size_t>(repeat)] = run_single_repeat(driver, cfg, repeat);
    if (out_params != nullptr) {
      (*out_params)[static_cast<std::size_t>(repeat)] = driver.take_params();
    }
  });

  std::vector<double> accuracies;
  accuracies.reserve(report.repeats.size());
  for (const auto& r : report.repeats) accuracies.push_back(r.test_accuracy);
  const Summary s = summarize(accuracies);
  report.mean_accuracy = s.mean;
  report.ci95 = s.ci95;
  report.wall_seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

}  // namespace fsnc
