#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arsgs/adapt.hpp"
#include "arsgs/targets.hpp"

namespace arsgs {

enum class Algorithm { Rsgs, Arsgs, ArsgsErgodic, Rwmwg, Arwmwg, Arwmwag };

struct ProposalScales {
  Vec beta;                      // per-coordinate proposal standard deviations
  double q_mix = 1.0;            // probability of using beta_i over the fallback
  double sigma_fallback = 5.0;
};

// Coordinate box for the gated (ergodic) variant.
struct GateRegion {
  Vec lower, upper;
  bool contains(const Vec& v) const;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::Arsgs;
  Schedule schedule;
  long total_samples = 0;
  int thinning = 1;
  std::uint64_t seed = 0;
  std::optional<GateRegion> gate_region;
  ProposalScales proposal;
  double ridge = 0.0;
  bool parallel = false;
  bool exact_sigma = false;      // adapt from the target's exact covariance
  Variant variant = Variant::Z;
  std::optional<Vec> p0;         // fixed-weight algorithms only
};

struct ChainRecord {
  long step;
  Vec x;
  std::vector<int> regimes;
};

struct TraceRow {
  long epoch;
  long n;        // raw samples seen so far
  Vec w;         // optimizer weights after this epoch's adaptation
  Vec p;         // selection probabilities published for this epoch
  double pg;     // running PG estimate (NaN before the first applied epoch)
  bool applied;  // false when the adaptation epoch was skipped
};

struct AcceptanceStats {
  std::vector<long> proposals;
  std::vector<long> accepts;
  Vec alpha_sum;
};

struct RunResult {
  std::vector<ChainRecord> chain;
  std::vector<TraceRow> trace;
  Vec final_p;
  double final_pg = std::numeric_limits<double>::quiet_NaN();
  Vec final_beta;
  AcceptanceStats accept;
  long skipped_epochs = 0;
  long total_steps = 0;
  double seconds_sampling = 0.0;
  double seconds_adaptation = 0.0;
};

// One RSGS transition: block i ~ p, redraw it from its full conditional.
ChainState rsgs_step(const Target& target, ChainState state,
                     const SelectionProbabilities& p, RngStream& rng);

struct MwgStepResult {
  bool accepted;
  double alpha;
  int coord;
};

// One coordinatewise random-walk Metropolis-within-Gibbs transition.
MwgStepResult rwmwg_step(const Target& target, ChainState& state,
                         const SelectionProbabilities& p,
                         const ProposalScales& scales, RngStream& rng);

// exp(n^{-0.7} (alpha - 0.44)), the multiplicative scale update.
double beta_update_factor(long n, double alpha);

// rwmwg_step plus the selected coordinate's scale update; n is the 1-based
// global step count.
MwgStepResult arwmwg_step(const Target& target, ChainState& state,
                          const SelectionProbabilities& p, ProposalScales& scales,
                          long n, RngStream& rng);

// Unified driver; dispatches on cfg.algorithm (serial or two-worker parallel).
RunResult run(const Target& target, const RunConfig& cfg);

RunResult run_arsgs(const Target& target, RunConfig cfg);
RunResult run_arsgs_ergodic(const Target& target, RunConfig cfg);
RunResult run_arwmwag(const Target& target, RunConfig cfg);
RunResult run_parallel(const Target& target, RunConfig cfg);

}  // namespace arsgs
