#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fsnc {

/// Outcome of finite-difference checks for one gradient path.
struct GradPathReport {
  std::string path;
  int instances = 0;
  int coordinates_checked = 0;
  double max_error = 0.0;
  int violations = 0;

  bool ok() const { return violations == 0; }
};

/// Central-difference validation of every analytic gradient path: the GCN
/// encoder + linear head, the MLP encoder + head, the linear probe head,
/// and the ProtoNet prototype-distance path. Each path runs `instances`
/// random small problems (<= 30 nodes, <= 10 features).
std::vector<GradPathReport> run_gradcheck_suite(int instances, double h, double tol,
                                                std::uint64_t seed);

std::string format_gradcheck_report(const std::vector<GradPathReport>& reports);

}  // namespace fsnc
