#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fsnc/methods.hpp"
#include "fsnc/stats.hpp"

namespace fsnc {

/// Unified evaluation protocol parameters (EI, S, E, M, T in the reports).
struct ProtocolConfig {
  int eval_interval = 10;    // EI: epochs between validation rounds
  int tasks_per_eval = 100;  // S: meta-tasks per evaluation
  int patience = 10;         // E: consecutive non-improving rounds tolerated
  int max_epochs = 10000;    // M
  int repeats = 5;           // T
  EpisodeSpec spec{2, 5, 10};
  Setting setting = Setting::inductive;
  MethodConfig method;
  std::uint64_t master_seed = 0;
  int jobs = 1;

  void validate() const;
};

struct RepeatResult {
  int repeat = 0;
  double test_accuracy = 0.0;
  double best_val_accuracy = 0.0;
  int stop_epoch = 0;  // epoch at which training stopped (early break or M)
};

struct RunReport {
  std::vector<RepeatResult> repeats;
  double mean_accuracy = 0.0;
  double ci95 = 0.0;
  double wall_seconds = 0.0;
};

// Seed derivation shared by the whole protocol. Everything is keyed off
// (master_seed, repeat), so repeats are independent and order-insensitive.
namespace seeds {
std::uint64_t init_seed(std::uint64_t master, int repeat);
std::uint64_t train_seed(std::uint64_t master, int repeat, int epoch);
std::uint64_t dev_seed(std::uint64_t master, int repeat, int round);
std::uint64_t test_seed(std::uint64_t master, int repeat);
}  // namespace seeds

/// What one repeat of the protocol drives. The standard driver wraps a
/// real method; tests substitute scripted mocks.
class MethodDriver {
 public:
  virtual ~MethodDriver() = default;
  virtual void initialize(int repeat) = 0;
  virtual void train_epoch(int repeat, int epoch) = 0;
  virtual double evaluate_dev(int repeat, int round) = 0;
  virtual double evaluate_test(int repeat) = 0;
  virtual void snapshot_best() = 0;
  virtual void restore_best() = 0;
};

/// One repeat: train with validation every eval_interval epochs, early
/// stop after `patience` consecutive non-improving rounds, then test at
/// the best-validation snapshot.
RepeatResult run_single_repeat(MethodDriver& driver, const ProtocolConfig& cfg, int repeat);

/// Per-episode evaluator signature used by the generic task loop.
using EpisodeEvaluator = std::function<EpisodeResult(const Episode&)>;

/// Mean accuracy over `count` episodes sampled with per-episode substreams
/// of `seed`. Parallelism (jobs) never changes the result: accuracies are
/// slotted by episode index and reduced in index order.
double evaluate_tasks_with(const SplitView& view, const EpisodeSpec& spec, int count,
                           std::uint64_t seed, const EpisodeEvaluator& evaluate, int jobs = 1);

/// Method-dispatching evaluation of S meta-tasks against frozen parameters.
double evaluate_tasks(const ParamSet& frozen, const SplitView& view, const EpisodeSpec& spec,
                      int count, std::uint64_t seed, const MethodConfig& method, int jobs = 1);

/// Fails fast when a partition lacks enough eligible classes for the
/// episode spec. run_protocol applies this before any training happens.
void check_view_feasibility(const ViewSet& views, const ProtocolConfig& cfg);

/// Full protocol: T repeats of train/validate/early-stop/test, then mean
/// and confidence interval over the repeat accuracies. If out_params is
/// given it receives each repeat's best-snapshot parameters.
RunReport run_protocol(std::shared_ptr<const Graph> graph, const ClassSplit& split,
                       const ProtocolConfig& cfg, std::vector<ParamSet>* out_params = nullptr);

}  // namespace fsnc
