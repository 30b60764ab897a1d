#pragma once

#include <cmath>
#include <limits>

#include "arsgs/blockmodel.hpp"
#include "arsgs/rng.hpp"

namespace arsgs {

enum class Variant { Z, Y };

// Adaptation schedules: a_m = log(50 sqrt(d) + m) / (50 sqrt(d) + m),
// b_m = a_m, eps = 1/d^2, k_m = 5000 by default. a_scale/b_scale exist so
// tests can freeze either sequence.
struct Schedule {
  int d = 1;
  double eps = 0.0;
  long epoch_length = 5000;
  double a_scale = 1.0;
  double b_scale = 1.0;
  double pace = 50.0;

  static Schedule defaults(int d, long epoch_length = 5000);

  double a(long m) const {
    const double c = pace * std::sqrt(static_cast<double>(d)) + static_cast<double>(m);
    return a_scale * std::log(c) / c;
  }
  double b(long m) const {
    const double c = pace * std::sqrt(static_cast<double>(d)) + static_cast<double>(m);
    return b_scale * std::log(c) / c;
  }
  long k(long) const { return epoch_length; }
};

// Optimizer iterate: weights, the power-iteration unit vector (z or y), the
// applied-epoch count driving the schedules (skipped epochs do not consume a
// step-size index), and the running PG estimate from the last applied epoch.
struct AdaptationState {
  BlockPartition part;
  WeightVector w;
  Vec iterate;  // unit (d+1)-vector
  Variant variant = Variant::Z;
  long epoch = 0;
  long samples_seen = 0;
  double last_pg = std::numeric_limits<double>::quiet_NaN();

  static AdaptationState init(const BlockPartition& part, double eps,
                              Variant variant, RngStream& rng);
};

enum class EpochOutcome { Applied, SkippedNotPd, SkippedFlat };

// Projection onto the contracted simplex (floor at eps, feasibility test,
// rescale, sort, threshold, assemble). Exact and idempotent.
WeightVector project_simplex_eps(const Vec& v, double eps);

// d_z(w)_i = <R_i(w) z, z>; raw components, the caller l1-normalizes.
// Throws ZeroDirection when every component is below 1e-300 in magnitude.
Vec supergradient_z(const Vec& z, const WeightVector& w,
                    const BlockPartition& part, const ExtendedMatrices& ext);

// d_y(w)_i = <dD^ext/dw_i y, y> = y_i' (Q_ii)^-1 y_i - y_{d+1}^2.
Vec supergradient_y(const Vec& y, const WeightVector& w,
                    const BlockPartition& part,
                    const std::vector<SymMatrix>& q_block_inv);

// One adaptation epoch: invert sigma_hat, rebuild the extended matrices, one
// perturbed power step, supergradient, l1-normalize, move by a_{i+1},
// project. The epoch counter advances even when the epoch is skipped.
EpochOutcome adapt_epoch(AdaptationState& state, const SymMatrix& sigma_hat,
                         const Schedule& sched, RngStream& perturb_rng);

// PG(p_opt) estimate ((sum w) * |map(iterate)|)^-1 for the state's variant.
double pg_estimate(const AdaptationState& state, const ExtendedMatrices& ext);

}  // namespace arsgs
