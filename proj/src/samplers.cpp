#include "arsgs/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace arsgs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void rsgs_step_inplace(const Target& target, ChainState& state,
                       const SelectionProbabilities& p, RngStream& rng) {
  const int block = rng.categorical(p.values());
  target.draw_block(state, block, rng);
  ++state.step;
}

bool is_mwg(Algorithm a) {
  return a == Algorithm::Rwmwg || a == Algorithm::Arwmwg ||
         a == Algorithm::Arwmwag;
}

bool adapts_weights(Algorithm a) {
  return a == Algorithm::Arsgs || a == Algorithm::ArsgsErgodic ||
         a == Algorithm::Arwmwag;
}

}  // namespace

bool GateRegion::contains(const Vec& v) const {
  if (lower.size() != v.size() || upper.size() != v.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < lower[i] || v[i] > upper[i]) return false;
  return true;
}

ChainState rsgs_step(const Target& target, ChainState state,
                     const SelectionProbabilities& p, RngStream& rng) {
  rsgs_step_inplace(target, state, p, rng);
  return state;
}

MwgStepResult rwmwg_step(const Target& target, ChainState& state,
                         const SelectionProbabilities& p,
                         const ProposalScales& scales, RngStream& rng) {
  const int coord = rng.categorical(p.values());
  const bool use_beta = rng.uniform() < scales.q_mix;
  const double sd = use_beta ? scales.beta[coord] : scales.sigma_fallback;
  const double proposal = state.x[coord] + sd * rng.normal();
  const double log_ratio = target.log_conditional_ratio(state, coord, proposal);
  const double alpha = std::min(1.0, std::exp(log_ratio));
  const bool accepted = rng.uniform() < alpha;
  if (accepted) state.x[coord] = proposal;
  ++state.step;
  return {accepted, alpha, coord};
}

double beta_update_factor(long n, double alpha) {
  return std::exp((alpha - 0.44) / std::pow(static_cast<double>(n), 0.7));
}

MwgStepResult arwmwg_step(const Target& target, ChainState& state,
                          const SelectionProbabilities& p, ProposalScales& scales,
                          long n, RngStream& rng) {
  const MwgStepResult res = rwmwg_step(target, state, p, scales, rng);
  scales.beta[res.coord] *= beta_update_factor(n, res.alpha);
  return res;
}

namespace {

struct Driver {
  const Target& target;
  const RunConfig& cfg;
  RngStream chain_rng, perturb_rng;
  RunResult out;

  ChainState state;
  SelectionProbabilities p;
  ProposalScales scales;
  CovarianceEstimate cov;
  std::optional<AdaptationState> astate;
  std::optional<SymMatrix> exact_sigma;

  Driver(const Target& t, const RunConfig& c)
      : target(t), cfg(c),
        chain_rng(RngStream(c.seed).substream(StreamId::Chain)),
        perturb_rng(RngStream(c.seed).substream(StreamId::Perturb)),
        state{}, p(SelectionProbabilities::uniform(t.partition().s())),
        scales(c.proposal), cov(t.dim(), c.ridge) {
    const int s = target.partition().s();
    const int d = target.dim();
    if (cfg.total_samples < 1)
      throw std::invalid_argument("run: total_samples must be >= 1");
    if (cfg.thinning < 1)
      throw std::invalid_argument("run: thinning must be >= 1");
    if (is_mwg(cfg.algorithm)) {
      if (s != d)
        throw std::invalid_argument(
            "run: Metropolis-within-Gibbs requires a coordinatewise partition");
      if (!target.supports_mwg())
        throw std::invalid_argument(
            "run: target does not provide conditional density ratios");
      if (scales.beta.empty()) scales.beta.assign(d, 1.0);
      if (static_cast<int>(scales.beta.size()) != d)
        throw std::invalid_argument("run: proposal scales dimension mismatch");
      for (double b : scales.beta)
        if (!(b > 0.0))
          throw std::invalid_argument("run: proposal scales must be positive");
      if (!(scales.q_mix > 0.0 && scales.q_mix <= 1.0) ||
          !(scales.sigma_fallback > 0.0))
        throw std::invalid_argument("run: invalid proposal mixture parameters");
      out.accept.proposals.assign(d, 0);
      out.accept.accepts.assign(d, 0);
      out.accept.alpha_sum.assign(d, 0.0);
    }
    if (cfg.algorithm == Algorithm::ArsgsErgodic && !cfg.gate_region)
      throw std::invalid_argument("run: gated variant needs a gate region");
    if (cfg.p0) {
      if (adapts_weights(cfg.algorithm))
        throw std::invalid_argument("run: p0 only applies to fixed-weight runs");
      p = SelectionProbabilities(*cfg.p0);
    }
    if (adapts_weights(cfg.algorithm)) {
      RngStream adapt_rng = RngStream(cfg.seed).substream(StreamId::Adapter);
      astate = AdaptationState::init(target.partition(), cfg.schedule.eps,
                                     cfg.variant, adapt_rng);
      p = normalize(astate->w);
      if (cfg.exact_sigma) {
        exact_sigma = target.exact_sigma();
        if (!exact_sigma)
          throw std::invalid_argument(
              "run: target has no exact covariance to inject");
      }
    }
    RngStream init_rng = RngStream(cfg.seed).substream(StreamId::Init);
    state = target.initial_state(init_rng);
    cov.update(target.adapt_vector(state));
  }

  void sample_block(long k) {
    const auto t0 = std::chrono::steady_clock::now();
    for (long j = 0; j < k; ++j) {
      if (is_mwg(cfg.algorithm)) {
        MwgStepResult res;
        if (cfg.algorithm == Algorithm::Rwmwg) {
          res = rwmwg_step(target, state, p, scales, chain_rng);
        } else {
          res = arwmwg_step(target, state, p, scales, out.total_steps + 1,
                            chain_rng);
        }
        out.accept.proposals[res.coord] += 1;
        out.accept.accepts[res.coord] += res.accepted ? 1 : 0;
        out.accept.alpha_sum[res.coord] += res.alpha;
      } else {
        rsgs_step_inplace(target, state, p, chain_rng);
      }
      ++out.total_steps;
      cov.update(target.adapt_vector(state));
      if (out.total_steps % cfg.thinning == 0)
        out.chain.push_back({out.total_steps, state.x, state.regimes});
    }
    out.seconds_sampling += seconds_since(t0);
  }

  std::optional<SymMatrix> sigma_snapshot() const {
    if (exact_sigma) return exact_sigma;
    if (!cov.has_estimate()) return std::nullopt;
    return cov.sigma_hat();
  }

  // One adaptation against the given snapshot; nullopt means a degenerate
  // estimate, which skips the epoch with weights held.
  EpochOutcome adapt_against(const std::optional<SymMatrix>& sigma) {
    if (!sigma) return EpochOutcome::SkippedNotPd;
    return adapt_epoch(*astate, *sigma, cfg.schedule, perturb_rng);
  }

  void publish_and_trace(EpochOutcome outcome, long epoch) {
    if (outcome != EpochOutcome::Applied) ++out.skipped_epochs;
    if (adapts_weights(cfg.algorithm)) {
      const bool gated = cfg.algorithm == Algorithm::ArsgsErgodic;
      if (!gated || cfg.gate_region->contains(target.adapt_vector(state)))
        p = normalize(astate->w);
    }
    astate->samples_seen = out.total_steps;
    out.trace.push_back({epoch, out.total_steps, astate->w.values(), p.values(),
                         astate->last_pg, outcome == EpochOutcome::Applied});
  }

  RunResult finish() {
    out.final_p = p.values();
    if (astate) out.final_pg = astate->last_pg;
    if (is_mwg(cfg.algorithm)) out.final_beta = scales.beta;
    return std::move(out);
  }

  RunResult run_serial() {
    if (!adapts_weights(cfg.algorithm)) {
      sample_block(cfg.total_samples);
      return finish();
    }
    long epoch = 0;
    while (out.total_steps < cfg.total_samples) {
      const long k = std::min<long>(cfg.schedule.k(epoch + 1),
                                    cfg.total_samples - out.total_steps);
      sample_block(k);
      const auto t0 = std::chrono::steady_clock::now();
      const EpochOutcome outcome = adapt_against(sigma_snapshot());
      out.seconds_adaptation += seconds_since(t0);
      publish_and_trace(outcome, epoch);
      ++epoch;
    }
    return finish();
  }

  // Two-worker mode: the adapter consumes the covariance snapshot taken at
  // epoch start while the sampler runs the epoch; both join at the boundary,
  // so the weights see the estimate lagged by exactly one epoch.
  RunResult run_parallel2() {
    long epoch = 0;
    while (out.total_steps < cfg.total_samples) {
      const long k = std::min<long>(cfg.schedule.k(epoch + 1),
                                    cfg.total_samples - out.total_steps);
      const std::optional<SymMatrix> snapshot = sigma_snapshot();
      EpochOutcome outcome = EpochOutcome::SkippedNotPd;
      double adapt_seconds = 0.0;
      std::thread adapter([&] {
        const auto t0 = std::chrono::steady_clock::now();
        outcome = adapt_against(snapshot);
        adapt_seconds = seconds_since(t0);
      });
      sample_block(k);
      adapter.join();
      out.seconds_adaptation += adapt_seconds;
      publish_and_trace(outcome, epoch);
      ++epoch;
    }
    return finish();
  }
};

}  // namespace

RunResult run(const Target& target, const RunConfig& cfg) {
  Driver driver(target, cfg);
  if (cfg.parallel && adapts_weights(cfg.algorithm))
    return driver.run_parallel2();
  return driver.run_serial();
}

RunResult run_arsgs(const Target& target, RunConfig cfg) {
  cfg.algorithm = Algorithm::Arsgs;
  cfg.parallel = false;
  return run(target, cfg);
}

RunResult run_arsgs_ergodic(const Target& target, RunConfig cfg) {
  cfg.algorithm = Algorithm::ArsgsErgodic;
  cfg.parallel = false;
  return run(target, cfg);
}

RunResult run_arwmwag(const Target& target, RunConfig cfg) {
  cfg.algorithm = Algorithm::Arwmwag;
  cfg.parallel = false;
  return run(target, cfg);
}

RunResult run_parallel(const Target& target, RunConfig cfg) {
  cfg.parallel = true;
  return run(target, cfg);
}

}  // namespace arsgs
