#include "arsgs/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arsgs {

Schedule Schedule::defaults(int d, long epoch_length) {
  Schedule s;
  s.d = d;
  // 1/d^2, except that a one-dimensional problem needs eps < 1/2
  s.eps = d >= 2 ? 1.0 / (static_cast<double>(d) * d) : 0.25;
  s.epoch_length = epoch_length;
  return s;
}

AdaptationState AdaptationState::init(const BlockPartition& part, double eps,
                                      Variant variant, RngStream& rng) {
  AdaptationState st{
      part,
      WeightVector(Vec(part.s(), 1.0 / (part.s() + 1)), eps),
      rng.unit_sphere(part.d() + 1), variant, 0, 0,
      std::numeric_limits<double>::quiet_NaN()};
  return st;
}

WeightVector project_simplex_eps(const Vec& v, double eps) {
  const int s = static_cast<int>(v.size());
  if (s < 1) throw std::invalid_argument("project_simplex_eps: empty input");
  if (!(eps > 0.0) || eps >= 1.0 / (s + 1))
    throw InvalidEpsilon("project_simplex_eps: need 0 < eps < 1/(s+1)");

  // Already-feasible points return unchanged (keeps the projection exactly
  // idempotent on the sum boundary).
  {
    bool feasible = true;
    double sum = 0.0;
    for (double x : v) {
      if (x < eps) feasible = false;
      sum += x;
    }
    if (feasible && 1.0 - sum >= eps - 1e-12) return WeightVector(v, eps);
  }

  // Step 1: floor at eps.
  Vec aux(v);
  for (double& x : aux) x = std::max(x, eps);

  // Step 2: feasibility test.
  const double aux_sum = std::accumulate(aux.begin(), aux.end(), 0.0);
  if (1.0 - aux_sum > eps) return WeightVector(std::move(aux), eps);

  // Step 3: rescale to the standard simplex.
  const double scale = 1.0 - eps * (s + 1);
  Vec temp(s);
  for (int j = 0; j < s; ++j) temp[j] = (aux[j] - eps) / scale;

  // Steps 4-6: sorted thresholding.
  Vec u(temp);
  std::sort(u.begin(), u.end(), std::greater<double>());
  int rho = 1;
  double partial = 0.0, partial_at_rho = u[0];
  for (int j = 1; j <= s; ++j) {
    partial += u[j - 1];
    if (u[j - 1] + (1.0 - partial) / j > 0.0) {
      rho = j;
      partial_at_rho = partial;
    }
  }
  const double lambda = (1.0 - partial_at_rho) / rho;

  // Step 7: assemble.
  Vec proj(s);
  for (int j = 0; j < s; ++j)
    proj[j] = eps + scale * std::max(temp[j] + lambda, 0.0);
  return WeightVector(std::move(proj), eps);
}

Vec supergradient_z(const Vec& z, const WeightVector& w,
                    const BlockPartition& part, const ExtendedMatrices&) {
  const int d = part.d();
  if (z.size() != static_cast<std::size_t>(d + 1))
    throw std::invalid_argument("supergradient_z: z must have length d+1");
  const double tail = z[d] * z[d] / (1.0 - w.sum());
  Vec g(part.s());
  bool nonzero = false;
  for (int i = 0; i < part.s(); ++i) {
    double quad = 0.0;
    for (int a = part.offset(i); a < part.offset(i) + part.size(i); ++a)
      quad += z[a] * z[a];
    g[i] = quad / w.values()[i] - tail;
    if (std::abs(g[i]) >= 1e-300) nonzero = true;
  }
  if (!nonzero) throw ZeroDirection("supergradient_z: all components vanish");
  return g;
}

Vec supergradient_y(const Vec& y, const WeightVector&,
                    const BlockPartition& part,
                    const std::vector<SymMatrix>& q_block_inv) {
  const int d = part.d();
  if (y.size() != static_cast<std::size_t>(d + 1))
    throw std::invalid_argument("supergradient_y: y must have length d+1");
  const double tail = y[d] * y[d];
  Vec g(part.s());
  bool nonzero = false;
  for (int i = 0; i < part.s(); ++i) {
    const int r = part.size(i), o = part.offset(i);
    double quad = 0.0;
    for (int a = 0; a < r; ++a)
      for (int c = 0; c < r; ++c)
        quad += y[o + a] * q_block_inv[i](a, c) * y[o + c];
    g[i] = quad - tail;
    if (std::abs(g[i]) >= 1e-300) nonzero = true;
  }
  if (!nonzero) throw ZeroDirection("supergradient_y: all components vanish");
  return g;
}

// state.epoch counts applied adaptation epochs and drives the a/b schedules;
// skipped epochs neither move the weights nor consume a schedule index.
EpochOutcome adapt_epoch(AdaptationState& state, const SymMatrix& sigma_hat,
                         const Schedule& sched, RngStream& perturb_rng) {
  const long m = state.epoch + 1;
  ExtendedMatrices ext;
  try {
    const SymMatrix q_hat = invert_spd(sigma_hat);
    ext = extend(sigma_hat, q_hat, state.part, state.w);
  } catch (const NotPositiveDefinite&) {
    return EpochOutcome::SkippedNotPd;
  } catch (const SingularBlock&) {
    return EpochOutcome::SkippedNotPd;
  }

  // Exactly one power-iteration multiply per epoch; its unperturbed norm is
  // the PG representation evaluated at the current iterate, so keep it.
  const Vec mapped = state.variant == Variant::Z
                         ? ext.apply_z_map(state.iterate)
                         : ext.apply_y_map(state.iterate);
  state.last_pg = 1.0 / (state.w.sum() * norm2(mapped));
  const Vec next_iterate = power_step(
      [&](const Vec&) { return mapped; }, state.iterate, sched.b(m), perturb_rng);

  Vec direction;
  try {
    direction = state.variant == Variant::Z
                    ? supergradient_z(next_iterate, state.w, state.part, ext)
                    : supergradient_y(next_iterate, state.w, state.part,
                                      ext.q_block_inv);
  } catch (const ZeroDirection&) {
    state.iterate = next_iterate;
    return EpochOutcome::SkippedFlat;
  }
  double l1 = 0.0;
  for (double g : direction) l1 += std::abs(g);
  if (l1 < 1e-300) {
    state.iterate = next_iterate;
    return EpochOutcome::SkippedFlat;
  }

  const double a = sched.a(m);
  Vec w_new(state.w.values());
  for (int j = 0; j < state.part.s(); ++j) w_new[j] += a * direction[j] / l1;
  state.w = project_simplex_eps(w_new, sched.eps);
  state.iterate = next_iterate;
  ++state.epoch;
  return EpochOutcome::Applied;
}

double pg_estimate(const AdaptationState& state, const ExtendedMatrices& ext) {
  const Vec mapped = state.variant == Variant::Z ? ext.apply_z_map(state.iterate)
                                                 : ext.apply_y_map(state.iterate);
  return 1.0 / (state.w.sum() * norm2(mapped));
}

}  // namespace arsgs
