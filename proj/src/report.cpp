#include "fsnc/report.hpp"

#include <cstdio>
#include <fstream>

namespace fsnc {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_run_report(const std::filesystem::path& dir, const RunConfig& config,
                      const RunReport& report) {
  std::filesystem::create_directories(dir);

  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = config.echo();
  nlohmann::json repeats = nlohmann::json::array();
  for (const auto& r : report.repeats) {
    repeats.push_back({{"repeat", r.repeat},
                       {"test_accuracy", r.test_accuracy},
                       {"best_val_accuracy", r.best_val_accuracy},
                       {"stop_epoch", r.stop_epoch}});
  }
  j["repeats"] = std::move(repeats);
  j["mean_accuracy"] = report.mean_accuracy;
  j["ci95"] = report.ci95;
  j["wall_seconds"] = report.wall_seconds;
  std::ofstream(dir / "report.json") << j.dump(2) << "\n";

  std::ofstream csv(dir / "report.csv");
  csv << "method,setting,n_way,k_shot,q_query,seed,repeat,test_accuracy,best_val_accuracy,stop_epoch\n";
  const ProtocolConfig& pc = config.protocol;
  for (const auto& r : report.repeats) {
    csv << to_string(pc.method.id) << "," << to_string(pc.setting) << "," << pc.spec.n_way << ","
        << pc.spec.k_shot << "," << pc.spec.q_query << "," << pc.master_seed << "," << r.repeat << ","
        << format_double(r.test_accuracy) << "," << format_double(r.best_val_accuracy) << ","
        << r.stop_epoch << "\n";
  }
}

nlohmann::json read_run_report(const std::filesystem::path& path) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(file)) file /= "report.json";
  std::ifstream in(file);
  if (!in) throw FsncError("cannot read report: " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FsncError(file.string() + ": invalid JSON: " + e.what());
  }
  return j;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream csv(path);
  if (!csv) throw FsncError("cannot write " + path.string());
  csv << "method,setting,n_way,k_shot,mean_accuracy,ci95\n";
  for (const auto& r : rows) {
    csv << r.method << "," << r.setting << "," << r.n_way << "," << r.k_shot << ","
        << format_double(r.mean_accuracy) << "," << format_double(r.ci95) << "\n";
  }
}

}  // namespace fsnc
