#include "arsgs/samplers.hpp"

#include <cmath>

#include "arsgs/gapcore.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace arsgs;

namespace {

bool chains_equal(const std::vector<ChainRecord>& a,
                  const std::vector<ChainRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].step != b[i].step || a[i].x != b[i].x || a[i].regimes != b[i].regimes)
      return false;
  }
  return true;
}

bool traces_equal(const std::vector<TraceRow>& a, const std::vector<TraceRow>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].epoch != b[i].epoch || a[i].n != b[i].n || a[i].w != b[i].w ||
        a[i].p != b[i].p)
      return false;
    const bool both_nan = std::isnan(a[i].pg) && std::isnan(b[i].pg);
    if (!both_nan && a[i].pg != b[i].pg) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("samplers") {

TEST_CASE("rsgs_step on a single block is an exact sampler") {
  // N(3, 4): precision 0.25
  GaussianTarget t({3.0}, SymMatrix::diagonal({0.25}),
                   BlockPartition::coordinatewise(1));
  RngStream rng(2);
  ChainState st{{0.0}, {}, 0};
  const SelectionProbabilities p = SelectionProbabilities::uniform(1);
  const long n = 50000;
  double sum = 0.0, sq = 0.0, cross = 0.0, prev = 0.0;
  for (long i = 0; i < n; ++i) {
    st = rsgs_step(t, st, p, rng);
    sum += st.x[0];
    sq += st.x[0] * st.x[0];
    if (i > 0) cross += st.x[0] * prev;
    prev = st.x[0];
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean - 3.0) < 4.0 * 2.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 4.0) < 0.2);
  const double lag1 = (cross / (n - 1) - mean * mean) / var;
  CHECK(std::abs(lag1) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("rsgs_step refreshes exactly one block") {
  GaussianTarget t(Vec(5, 0.0), SymMatrix::identity(5),
                   BlockPartition::coordinatewise(5));
  RngStream rng(6);
  ChainState st{{1.0, 2.0, 3.0, 4.0, 5.0}, {}, 0};
  const SelectionProbabilities p = SelectionProbabilities::uniform(5);
  for (int rep = 0; rep < 50; ++rep) {
    const ChainState next = rsgs_step(t, st, p, rng);
    int changed = 0;
    for (int i = 0; i < 5; ++i)
      if (next.x[i] != st.x[i]) ++changed;
    CHECK(changed == 1);
    CHECK(next.step == st.step + 1);
    st = next;
  }
}

TEST_CASE("rsgs lag-1 autocorrelation on the correlated pair") {
  // x1 refreshes with prob 1/2 to N(rho x2, 1-rho^2):
  // lag-1 autocorr of x1 is (1 + rho^2)/2
  const double rho = 0.5;
  const SymMatrix sigma = SymMatrix::from_entries(2, {1, rho, rho, 1});
  GaussianTarget t({0.0, 0.0}, invert_spd(sigma), BlockPartition::coordinatewise(2));
  RngStream rng = RngStream(8).substream(StreamId::Chain);
  ChainState st{{0.0, 0.0}, {}, 0};
  const SelectionProbabilities p = SelectionProbabilities::uniform(2);
  const long n = 1000000;
  double sum = 0.0, sq = 0.0, cross = 0.0, prev = 0.0;
  for (long i = 0; i < n; ++i) {
    st = rsgs_step(t, st, p, rng);
    sum += st.x[0];
    sq += st.x[0] * st.x[0];
    if (i > 0) cross += st.x[0] * prev;
    prev = st.x[0];
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  const double lag1 = (cross / (n - 1) - mean * mean) / var;
  CHECK(std::abs(lag1 - (1.0 + rho * rho) / 2.0) < 0.01);
}

TEST_CASE("metropolis acceptance arithmetic") {
  GaussianTarget t({0.0}, SymMatrix::identity(1), BlockPartition::coordinatewise(1));
  ChainState st{{0.0}, {}, 0};
  // standing still accepts
  CHECK(t.log_conditional_ratio(st, 0, 0.0) == doctest::Approx(0.0));
  // X=0 -> Y=1 on a standard normal: alpha = exp(-1/2)
  CHECK(std::exp(t.log_conditional_ratio(st, 0, 1.0)) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  // moving toward the mode of a symmetric unimodal conditional accepts
  ChainState st2{{2.0}, {}, 0};
  CHECK(t.log_conditional_ratio(st2, 0, 1.0) > 0.0);
}

TEST_CASE("beta update rule") {
  CHECK(beta_update_factor(10, 0.44) == doctest::Approx(1.0));
  CHECK(beta_update_factor(1, 1.0) == doctest::Approx(std::exp(0.56)).epsilon(1e-12));
  CHECK(beta_update_factor(1, 1.0) == doctest::Approx(1.7507).epsilon(1e-4));
  CHECK(beta_update_factor(1024, 0.2) ==
        doctest::Approx(std::exp(-0.24 / std::pow(1024.0, 0.7))));
}

TEST_CASE("arwmwg_step touches only the selected scale") {
  GaussianTarget t(Vec(4, 0.0), SymMatrix::identity(4),
                   BlockPartition::coordinatewise(4));
  RngStream rng(12);
  ChainState st{{0.1, 0.2, 0.3, 0.4}, {}, 0};
  ProposalScales scales{Vec(4, 1.0), 1.0, 5.0};
  const SelectionProbabilities p = SelectionProbabilities::uniform(4);
  for (long n = 1; n <= 30; ++n) {
    const Vec before = scales.beta;
    const MwgStepResult res = arwmwg_step(t, st, p, scales, n, rng);
    for (int i = 0; i < 4; ++i) {
      if (i == res.coord)
        CHECK(scales.beta[i] == doctest::Approx(before[i] * beta_update_factor(n, res.alpha)));
      else
        CHECK(scales.beta[i] == before[i]);
    }
  }
}

TEST_CASE("arwmwg drives acceptance toward 0.44") {
  GaussianTarget t({0.0}, SymMatrix::identity(1), BlockPartition::coordinatewise(1));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arwmwg;
  cfg.schedule = Schedule::defaults(1);
  cfg.total_samples = 200000;
  cfg.thinning = 200000;
  cfg.seed = 14;
  const RunResult res = run(t, cfg);
  const double mean_alpha = res.accept.alpha_sum[0] / res.accept.proposals[0];
  CHECK(mean_alpha > 0.40);
  CHECK(mean_alpha < 0.48);
}

TEST_CASE("rwmwg detailed balance on a binned state space") {
  GaussianTarget t({0.0}, SymMatrix::identity(1), BlockPartition::coordinatewise(1));
  RngStream rng = RngStream(16).substream(StreamId::Chain);
  ChainState st{{0.0}, {}, 0};
  ProposalScales scales{{2.4}, 1.0, 5.0};
  const SelectionProbabilities p = SelectionProbabilities::uniform(1);
  const int bins = 20;
  const double lo = -2.5, hi = 2.5;
  std::vector<std::vector<long>> flow(bins, std::vector<long>(bins, 0));
  auto bin_of = [&](double x) {
    const int b = static_cast<int>((x - lo) / (hi - lo) * bins);
    return b < 0 ? -1 : (b >= bins ? -1 : b);
  };
  int prev = bin_of(st.x[0]);
  for (long i = 0; i < 1000000; ++i) {
    rwmwg_step(t, st, p, scales, rng);
    const int cur = bin_of(st.x[0]);
    if (prev >= 0 && cur >= 0) flow[prev][cur] += 1;
    prev = cur;
  }
  for (int a = 0; a < bins; ++a)
    for (int b = a + 1; b < bins; ++b) {
      const double nab = static_cast<double>(flow[a][b]);
      const double nba = static_cast<double>(flow[b][a]);
      if (nab + nba < 100) continue;
      const double z = (nab - nba) / std::sqrt(nab + nba);
      CHECK(std::abs(z) < 5.0);
    }
}

TEST_CASE("frozen schedule reduces arsgs to the vanilla chain") {
  const SymMatrix q = invert_spd(SymMatrix::from_entries(2, {1, 0.5, 0.5, 1}));
  GaussianTarget t({0.0, 0.0}, q, BlockPartition::coordinatewise(2));

  RunConfig vanilla;
  vanilla.algorithm = Algorithm::Rsgs;
  vanilla.schedule = Schedule::defaults(2);
  vanilla.total_samples = 20000;
  vanilla.thinning = 1;
  vanilla.seed = 123;

  RunConfig frozen = vanilla;
  frozen.algorithm = Algorithm::Arsgs;
  frozen.schedule.a_scale = 0.0;
  frozen.schedule.epoch_length = 500;

  const RunResult a = run(t, vanilla);
  const RunResult b = run(t, frozen);
  CHECK(chains_equal(a.chain, b.chain));
  for (const TraceRow& row : b.trace)
    for (double pi : row.p) CHECK(pi == doctest::Approx(0.5));
}

TEST_CASE("published probabilities stay inside the contracted simplex") {
  GaussianTarget t(Vec(4, 0.0), make_example1({0.9, 0.5}),
                   BlockPartition::coordinatewise(4));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arsgs;
  cfg.schedule = Schedule::defaults(4, 200);
  cfg.total_samples = 60000;
  cfg.thinning = 60000;
  cfg.seed = 9;
  const RunResult res = run(t, cfg);
  const double eps = cfg.schedule.eps;
  const double floor = eps / (4 * (1.0 - eps));
  CHECK(res.trace.size() == 300);
  for (const TraceRow& row : res.trace) {
    double sum = 0.0;
    for (double pi : row.p) {
      CHECK(pi > 0.0);
      CHECK(pi >= floor);
      sum += pi;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("degenerate early estimates are skipped and the run continues") {
  GaussianTarget t({0.0, 0.0}, SymMatrix::identity(2),
                   BlockPartition::coordinatewise(2));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arsgs;
  cfg.schedule = Schedule::defaults(2, 1);  // 1-step epochs: early rank-deficient sigma
  cfg.total_samples = 3000;
  cfg.thinning = 3000;
  cfg.seed = 77;
  const RunResult res = run(t, cfg);
  CHECK(res.skipped_epochs >= 1);
  CHECK_FALSE(res.trace[0].applied);
  CHECK(res.trace.back().applied);
  CHECK(res.total_steps == 3000);
}

TEST_CASE("exact covariance injection converges to the pair optimum") {
  GaussianTarget t(Vec(4, 0.0), make_example1({0.9, 0.5}),
                   BlockPartition::coordinatewise(4));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arsgs;
  cfg.schedule = Schedule::defaults(4, 1);
  cfg.total_samples = 5000;  // 5000 one-step epochs
  cfg.thinning = 5000;
  cfg.seed = 2024;
  cfg.exact_sigma = true;
  const auto [p_cf, pg_cf] = closed_form_pairs({0.9, 0.5});
  for (Variant v : {Variant::Z, Variant::Y}) {
    cfg.variant = v;
    const RunResult res = run(t, cfg);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(res.final_p[i] - p_cf.values()[i]) < 0.05);
  }
}

TEST_CASE("gated variant") {
  GaussianTarget t({0.0, 0.0}, SymMatrix::identity(2),
                   BlockPartition::coordinatewise(2));
  RunConfig base;
  base.algorithm = Algorithm::Arsgs;
  base.schedule = Schedule::defaults(2, 100);
  base.total_samples = 20000;
  base.thinning = 20000;
  base.seed = 4;

  const RunResult ungated = run(t, base);

  RunConfig whole = base;
  whole.algorithm = Algorithm::ArsgsErgodic;
  whole.gate_region = GateRegion{Vec(2, -1e12), Vec(2, 1e12)};
  const RunResult gated_whole = run(t, whole);
  CHECK(chains_equal(ungated.chain, gated_whole.chain));
  CHECK(traces_equal(ungated.trace, gated_whole.trace));

  // a generous box on a standard Gaussian behaves the same
  RunConfig big = whole;
  big.gate_region = GateRegion{Vec(2, -10.0), Vec(2, 10.0)};
  const RunResult gated_big = run(t, big);
  CHECK(traces_equal(ungated.trace, gated_big.trace));

  // an empty box freezes the published probabilities at p0 forever
  RunConfig empty = whole;
  empty.gate_region = GateRegion{Vec(2, 1.0), Vec(2, -1.0)};
  const RunResult frozen = run(t, empty);
  bool w_moved = false;
  for (const TraceRow& row : frozen.trace) {
    for (double pi : row.p) CHECK(pi == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 0; i < row.w.size(); ++i)
      if (std::abs(row.w[i] - 1.0 / 3) > 1e-9) w_moved = true;
  }
  CHECK(w_moved);  // the optimizer keeps running underneath
}

TEST_CASE("parallel runs reproduce and lag by one epoch") {
  // with exact covariance the parallel trace coincides with the serial one
  {
    GaussianTarget t(Vec(4, 0.0), make_example1({0.6, 0.3}),
                     BlockPartition::coordinatewise(4));
    RunConfig cfg;
    cfg.algorithm = Algorithm::Arsgs;
    cfg.schedule = Schedule::defaults(4, 50);
    cfg.total_samples = 5000;
    cfg.thinning = 10;
    cfg.seed = 31;
    cfg.exact_sigma = true;
    const RunResult serial = run(t, cfg);
    cfg.parallel = true;
    const RunResult par1 = run(t, cfg);
    const RunResult par2 = run(t, cfg);
    CHECK(chains_equal(serial.chain, par1.chain));
    CHECK(traces_equal(serial.trace, par1.trace));
    CHECK(chains_equal(par1.chain, par2.chain));
    CHECK(traces_equal(par1.trace, par2.trace));
  }
  // with estimated covariance the weights lag exactly one epoch (d = 1
  // makes the chain independent of the published weights)
  {
    GaussianTarget t({0.0}, SymMatrix::identity(1), BlockPartition::coordinatewise(1));
    RunConfig cfg;
    cfg.algorithm = Algorithm::Arsgs;
    cfg.schedule = Schedule::defaults(1, 20);
    cfg.schedule.eps = 0.2;
    cfg.total_samples = 400;  // 20 epochs
    cfg.thinning = 400;
    cfg.seed = 13;
    const RunResult serial = run(t, cfg);
    cfg.parallel = true;
    const RunResult par = run(t, cfg);
    CHECK(chains_equal(serial.chain, par.chain));
    REQUIRE(par.trace.size() == serial.trace.size());
    CHECK_FALSE(par.trace[0].applied);
    for (std::size_t i = 0; i + 1 < par.trace.size(); ++i) {
      CHECK(par.trace[i + 1].w == serial.trace[i].w);
      CHECK(par.trace[i + 1].applied == serial.trace[i].applied);
    }
  }
  // a single epoch covering the whole run gives the serial chain
  {
    GaussianTarget t({0.0, 0.0}, SymMatrix::identity(2),
                     BlockPartition::coordinatewise(2));
    RunConfig cfg;
    cfg.algorithm = Algorithm::Arsgs;
    cfg.schedule = Schedule::defaults(2, 1000000);
    cfg.total_samples = 5000;
    cfg.thinning = 1;
    cfg.seed = 5;
    const RunResult serial = run(t, cfg);
    cfg.parallel = true;
    const RunResult par = run(t, cfg);
    CHECK(chains_equal(serial.chain, par.chain));
  }
}

TEST_CASE("arwmwag adapts scales and weights together") {
  GaussianTarget t(Vec(4, 0.0), make_example1({0.9, 0.5}),
                   BlockPartition::coordinatewise(4));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arwmwag;
  cfg.schedule = Schedule::defaults(4, 500);
  cfg.total_samples = 1000000;
  cfg.thinning = 1000000;
  cfg.seed = 11;
  const RunResult res = run(t, cfg);
  const auto [p_cf, pg_cf] = closed_form_pairs({0.9, 0.5});
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(res.final_p[i] - p_cf.values()[i]) < 0.1);
  for (int i = 0; i < 4; ++i) {
    const double mean_alpha = res.accept.alpha_sum[i] / res.accept.proposals[i];
    CHECK(mean_alpha > 0.41);
    CHECK(mean_alpha < 0.47);
  }
}

TEST_CASE("arwmwag with a frozen weight schedule is arwmwg") {
  GaussianTarget t(Vec(2, 0.0), SymMatrix::identity(2),
                   BlockPartition::coordinatewise(2));
  RunConfig base;
  base.algorithm = Algorithm::Arwmwg;
  base.schedule = Schedule::defaults(2);
  base.total_samples = 20000;
  base.thinning = 1;
  base.seed = 88;

  RunConfig frozen = base;
  frozen.algorithm = Algorithm::Arwmwag;
  frozen.schedule.a_scale = 0.0;
  frozen.schedule.epoch_length = 500;

  const RunResult a = run(t, base);
  const RunResult b = run(t, frozen);
  CHECK(chains_equal(a.chain, b.chain));
  CHECK(a.final_beta == b.final_beta);
}

TEST_CASE("sampled adaptation approaches the arrowhead optimum") {
  GaussianTarget t(Vec(50, 0.0), invert_spd(make_example2(50, 1.0 / 7.01)),
                   BlockPartition::coordinatewise(50));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arsgs;
  cfg.schedule = Schedule::defaults(50, 5000);
  cfg.total_samples = 5000000;
  cfg.thinning = cfg.total_samples;
  cfg.seed = 17;
  const RunResult res = run(t, cfg);
  CHECK(std::abs(res.final_p[0] - 0.484) < 0.05);
}

TEST_CASE("trace does not depend on the recording thinning") {
  GaussianTarget t(Vec(4, 0.0), make_example1({0.7, 0.2}),
                   BlockPartition::coordinatewise(4));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arsgs;
  cfg.schedule = Schedule::defaults(4, 250);
  cfg.total_samples = 10000;
  cfg.thinning = 1;
  cfg.seed = 62;
  const RunResult fine = run(t, cfg);
  cfg.thinning = 100;
  const RunResult coarse = run(t, cfg);
  CHECK(traces_equal(fine.trace, coarse.trace));
  CHECK(fine.chain.size() == 10000);
  CHECK(coarse.chain.size() == 100);
}

TEST_CASE("parallel arwmwag reproduces itself") {
  GaussianTarget t(Vec(4, 0.0), make_example1({0.8, 0.4}),
                   BlockPartition::coordinatewise(4));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arwmwag;
  cfg.schedule = Schedule::defaults(4, 200);
  cfg.total_samples = 20000;
  cfg.thinning = 10;
  cfg.seed = 314;
  cfg.parallel = true;
  const RunResult a = run(t, cfg);
  const RunResult b = run(t, cfg);
  CHECK(chains_equal(a.chain, b.chain));
  CHECK(traces_equal(a.trace, b.trace));
  CHECK(a.final_beta == b.final_beta);
}

TEST_CASE("seeded runs are reproducible") {
  MsmTarget t({0.4, -0.2, 1.0, 0.3}, 0.2, 0.3, 0.5, 4.0, 1.0);
  RunConfig cfg;
  cfg.algorithm = Algorithm::Arsgs;
  cfg.schedule = Schedule::defaults(8, 100);
  cfg.total_samples = 5000;
  cfg.thinning = 5;
  cfg.seed = 1001;
  cfg.ridge = 1.0 / 512.0;
  const RunResult a = run(t, cfg);
  const RunResult b = run(t, cfg);
  CHECK(chains_equal(a.chain, b.chain));
  CHECK(traces_equal(a.trace, b.trace));
  CHECK(a.final_p == b.final_p);
}

TEST_CASE("thinning controls recording only") {
  GaussianTarget t({0.0, 0.0}, SymMatrix::identity(2),
                   BlockPartition::coordinatewise(2));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Rsgs;
  cfg.schedule = Schedule::defaults(2);
  cfg.total_samples = 10000;
  cfg.thinning = 7;
  cfg.seed = 3;
  const RunResult res = run(t, cfg);
  CHECK(static_cast<long>(res.chain.size()) == 10000 / 7);
  for (std::size_t i = 0; i < res.chain.size(); ++i)
    CHECK(res.chain[i].step == static_cast<long>(7 * (i + 1)));
}

TEST_CASE("stationarity of rsgs on the correlated gaussian") {
  const SymMatrix sigma = SymMatrix::from_entries(2, {1, 0.5, 0.5, 1});
  GaussianTarget t({0.0, 0.0}, invert_spd(sigma), BlockPartition::coordinatewise(2));
  RunConfig cfg;
  cfg.algorithm = Algorithm::Rsgs;
  cfg.schedule = Schedule::defaults(2);
  cfg.total_samples = 1000000;
  cfg.thinning = 1;
  cfg.seed = 2718;
  const RunResult res = run(t, cfg);
  double m1 = 0, m2 = 0, s11 = 0, s22 = 0, s12 = 0;
  const double n = static_cast<double>(res.chain.size());
  for (const ChainRecord& r : res.chain) {
    m1 += r.x[0];
    m2 += r.x[1];
  }
  m1 /= n;
  m2 /= n;
  for (const ChainRecord& r : res.chain) {
    s11 += (r.x[0] - m1) * (r.x[0] - m1);
    s22 += (r.x[1] - m2) * (r.x[1] - m2);
    s12 += (r.x[0] - m1) * (r.x[1] - m2);
  }
  // 4 standard errors using the measured asymptotic variance scale (~6)
  const double se = std::sqrt(6.0 / n);
  CHECK(std::abs(m1) < 4.0 * se);
  CHECK(std::abs(m2) < 4.0 * se);
  CHECK(std::abs(s11 / (n - 1) - 1.0) < 0.05);
  CHECK(std::abs(s22 / (n - 1) - 1.0) < 0.05);
  CHECK(std::abs(s12 / (n - 1) - 0.5) < 0.05);
}

TEST_CASE("config validation") {
  GaussianTarget t({0.0, 0.0}, SymMatrix::identity(2),
                   BlockPartition::coordinatewise(2));
  RunConfig cfg;
  cfg.schedule = Schedule::defaults(2);
  cfg.total_samples = 0;
  CHECK_THROWS_AS(run(t, cfg), std::invalid_argument);
  cfg.total_samples = 10;
  cfg.algorithm = Algorithm::ArsgsErgodic;
  CHECK_THROWS_AS(run(t, cfg), std::invalid_argument);  // missing gate region
  cfg.algorithm = Algorithm::Arsgs;
  cfg.p0 = Vec{0.5, 0.5};
  CHECK_THROWS_AS(run(t, cfg), std::invalid_argument);  // p0 with adaptive weights

  MsmTarget msm({0.1, 0.2}, 0.5, 0.5, 1.0, 2.0, 1.0);
  RunConfig mwg;
  mwg.algorithm = Algorithm::Rwmwg;
  mwg.schedule = Schedule::defaults(4);
  mwg.total_samples = 10;
  CHECK_THROWS_AS(run(msm, mwg), std::invalid_argument);  // no conditional ratios
}

}  // TEST_SUITE
