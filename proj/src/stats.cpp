#include "fsnc/stats.hpp"

#include <cmath>

#include "fsnc/graph.hpp"

namespace fsnc {

Summary summarize(std::span<const double> series) {
  if (series.empty()) throw FsncError("summarize: empty series");
  const double n = static_cast<double>(series.size());
  double sum = 0.0;
  for (double v : series) sum += v;
  Summary s;
  s.mean = sum / n;
  if (series.size() == 1) return s;

  double sq = 0.0;
  for (double v : series) sq += (v - s.mean) * (v - s.mean);
  const double sample_std = std::sqrt(sq / (n - 1.0));
  s.ci95 = 1.96 * sample_std / std::sqrt(n);
  return s;
}

}  // namespace fsnc
