#pragma once

#include "fsnc/config.hpp"
#include "fsnc/report.hpp"

namespace fsnc {

struct RunOutcome {
  RunConfig resolved;  // config with dataset-derived defaults filled in
  RunReport report;
  std::vector<ParamSet> best_params;  // per repeat, when save_checkpoints
};

/// Loads the dataset, builds the class split, runs the protocol and, when
/// the config names an output directory, writes report.json/report.csv
/// (plus per-repeat checkpoints when save_checkpoints is set).
RunOutcome execute_run(RunConfig cfg);

/// Config validation plus view construction and feasibility checks, with
/// no training. What `run --dry-run` does.
RunConfig validate_run(RunConfig cfg);

}  // namespace fsnc
