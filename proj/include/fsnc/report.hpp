#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fsnc/config.hpp"
#include "fsnc/protocol.hpp"

namespace fsnc {

/// Writes report.json (summary + config echo) and report.csv (one row per
/// repeat, no wall-clock columns) into `dir`.
void write_run_report(const std::filesystem::path& dir, const RunConfig& config,
                      const RunReport& report);

/// Reads report.json back for pretty-printing.
nlohmann::json read_run_report(const std::filesystem::path& path);

struct SweepRow {
  std::string method;
  std::string setting;
  int n_way = 0;
  int k_shot = 0;
  double mean_accuracy = 0.0;
  double ci95 = 0.0;
};

/// Long-form CSV with one row per (N, K) pair, ready for plotting.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace fsnc
