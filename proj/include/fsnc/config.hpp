#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fsnc/protocol.hpp"

namespace fsnc {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// A fully resolved run configuration. `echo()` returns the exact resolved
/// values (defaults materialized, seed after any FSNC_SEED override), which
/// is what reports embed so a run can be reproduced byte-for-byte.
struct RunConfig {
  std::filesystem::path dataset;
  std::optional<std::array<int, 3>> split_sizes;  // defaults to the dataset's meta split
  SplitSeed split_seed = SplitSeed::fixed_assignment();
  ProtocolConfig protocol;
  std::optional<std::filesystem::path> out;
  bool save_checkpoints = false;
  bool seed_from_env = false;

  nlohmann::json echo() const;
};

/// Parses and validates a run config file. Unknown keys anywhere in the
/// document are rejected; the dataset path must exist. The FSNC_SEED
/// environment variable, when set, overrides the configured seed.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const nlohmann::json& j, const std::string& origin);

}  // namespace fsnc
