#pragma once

#include <vector>

#include "arsgs/linalg.hpp"

namespace arsgs {

struct AcfResult {
  std::vector<int> lags;
  Vec values;  // values[0] == 1
};

// Biased sample autocorrelation (lag-0 normalized). Throws ZeroVariance on a
// constant series and TooShort when length <= max_lag.
AcfResult acf(const Vec& series, int max_lag);

// Batch means with batch size floor(sqrt(N)): batch * sample variance of the
// batch means. Throws TooShort below 100 points.
double batch_means_asvar(const Vec& series);

struct AsvarReport {
  Vec per_coordinate;          // NaN for excluded coordinates
  double max_value = 0.0;
  int max_index = -1;
  std::vector<int> excluded;   // zero-variance coordinates
};

// Asymptotic variance of each l_i = x_i / sd(x_i), reported per coordinate
// with the worst one flagged.
AsvarReport worst_linear_asvar(const std::vector<Vec>& columns);

struct KvCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

// Kipnis-Varadhan: sigma2_as(f) <= ((2 - Gap)/Gap) Var_pi(f), with a
// multiplicative statistical slack on the right-hand side.
KvCheck kv_bound_check(double asvar, double gap, double var_pi,
                       double slack = 0.0);

}  // namespace arsgs
