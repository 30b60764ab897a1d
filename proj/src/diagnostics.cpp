#include "arsgs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arsgs/errors.hpp"

namespace arsgs {

namespace {

double mean_of(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

AcfResult acf(const Vec& series, int max_lag) {
  const long n = static_cast<long>(series.size());
  if (max_lag < 0) throw std::invalid_argument("acf: max_lag < 0");
  if (n <= max_lag) throw TooShort("acf: series length must exceed max_lag");
  const double mu = mean_of(series);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mu) * (x - mu);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) throw ZeroVariance("acf: constant series");

  AcfResult r;
  r.lags.resize(max_lag + 1);
  r.values.resize(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double ck = 0.0;
    for (long t = 0; t + k < n; ++t)
      ck += (series[t] - mu) * (series[t + k] - mu);
    ck /= static_cast<double>(n);
    r.lags[k] = k;
    r.values[k] = ck / c0;
  }
  return r;
}

double batch_means_asvar(const Vec& series) {
  const long n = static_cast<long>(series.size());
  if (n < 100) throw TooShort("batch_means_asvar: need at least 100 points");
  const long b = static_cast<long>(std::floor(std::sqrt(static_cast<double>(n))));
  const long a = n / b;
  Vec means(a);
  for (long j = 0; j < a; ++j) {
    double s = 0.0;
    for (long t = j * b; t < (j + 1) * b; ++t) s += series[t];
    means[j] = s / static_cast<double>(b);
  }
  const double grand = mean_of(means);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(a - 1);
  return static_cast<double>(b) * var;
}

AsvarReport worst_linear_asvar(const std::vector<Vec>& columns) {
  if (columns.empty())
    throw std::invalid_argument("worst_linear_asvar: empty chain");
  AsvarReport rep;
  rep.per_coordinate.assign(columns.size(), std::numeric_limits<double>::quiet_NaN());
  rep.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Vec& col = columns[i];
    const double mu = mean_of(col);
    double var = 0.0;
    for (double x : col) var += (x - mu) * (x - mu);
    var /= static_cast<double>(col.size() - 1);
    if (var <= 0.0) {
      rep.excluded.push_back(static_cast<int>(i));
      continue;
    }
    const double v = batch_means_asvar(col) / var;
    rep.per_coordinate[i] = v;
    if (v > rep.max_value) {
      rep.max_value = v;
      rep.max_index = static_cast<int>(i);
    }
  }
  if (rep.max_index < 0)
    throw ZeroVariance("worst_linear_asvar: every coordinate is constant");
  return rep;
}

KvCheck kv_bound_check(double asvar, double gap, double var_pi, double slack) {
  if (!(gap > 0.0 && gap < 1.0 + 1e-12))
    throw std::invalid_argument("kv_bound_check: need 0 < gap <= 1");
  KvCheck c;
  c.lhs = asvar;
  c.rhs = (2.0 - gap) / gap * var_pi;
  c.satisfied = c.lhs <= c.rhs * (1.0 + slack);
  return c;
}

}  // namespace arsgs
