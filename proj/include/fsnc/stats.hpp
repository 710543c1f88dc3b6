#pragma once

#include <span>

namespace fsnc {

struct Summary {
  double mean = 0.0;
  double ci95 = 0.0;  // 1.96 * s / sqrt(n), sample std; 0 when n == 1
};

/// Mean and 95% confidence interval of a nonempty accuracy series.
Summary summarize(std::span<const double> series);

}  // namespace fsnc
