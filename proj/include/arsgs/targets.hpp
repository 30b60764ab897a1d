#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "arsgs/blockmodel.hpp"
#include "arsgs/normal.hpp"
#include "arsgs/rng.hpp"

namespace arsgs {

struct ChainState {
  Vec x;
  std::vector<int> regimes;  // MSM only
  long step = 0;
};

// A target exposes block full-conditional sampling for the Gibbs kernels and
// (when supported) the conditional density ratio the Metropolis-within-Gibbs
// acceptance needs. Immutable after construction; all randomness comes from
// the caller's stream.
class Target {
 public:
  virtual ~Target() = default;

  virtual const BlockPartition& partition() const = 0;
  int dim() const { return partition().d(); }

  virtual ChainState initial_state(RngStream& rng) const = 0;
  virtual void draw_block(ChainState& state, int block, RngStream& rng) const = 0;

  virtual bool supports_mwg() const { return false; }
  // log( pi(proposal | x_{-coord}) / pi(x_coord | x_{-coord}) )
  virtual double log_conditional_ratio(const ChainState&, int /*coord*/,
                                       double /*proposal*/) const;

  // The vector the covariance estimator ingests (continuous coordinates,
  // then regimes cast to doubles).
  virtual Vec adapt_vector(const ChainState& state) const { return state.x; }
  virtual int regime_count() const { return 0; }

  // Exact covariance when known in closed form (Gaussian targets), used by
  // the exact-Sigma injection mode.
  virtual std::optional<SymMatrix> exact_sigma() const { return std::nullopt; }
};

class GaussianTarget : public Target {
 public:
  GaussianTarget(Vec mean, SymMatrix precision, BlockPartition part);

  const BlockPartition& partition() const override { return part_; }
  ChainState initial_state(RngStream& rng) const override;
  void draw_block(ChainState& state, int block, RngStream& rng) const override;
  bool supports_mwg() const override { return true; }
  double log_conditional_ratio(const ChainState& state, int coord,
                               double proposal) const override;
  std::optional<SymMatrix> exact_sigma() const override;

  const SymMatrix& precision() const { return q_; }
  const Vec& mean() const { return mean_; }

  // Conditional mean and covariance of block i given the rest, for tests.
  std::pair<Vec, SymMatrix> conditional_moments(const ChainState& state,
                                                int block) const;

 private:
  Vec mean_;
  SymMatrix q_;
  BlockPartition part_;
  std::vector<LowerTriangular> block_chol_;  // chol(Q_ii)
};

class TmvnTarget : public Target {
 public:
  TmvnTarget(SymMatrix sigma0, Vec lower, Vec upper);

  const BlockPartition& partition() const override { return part_; }
  ChainState initial_state(RngStream& rng) const override;
  void draw_block(ChainState& state, int coord, RngStream& rng) const override;
  bool supports_mwg() const override { return true; }
  double log_conditional_ratio(const ChainState& state, int coord,
                               double proposal) const override;

  const SymMatrix& sigma0() const { return sigma0_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  // (conditional mean, conditional sd, lower, upper) of coordinate i.
  struct Conditional {
    double mean, sd, lo, hi;
  };
  Conditional conditional(const ChainState& state, int coord) const;

 private:
  SymMatrix sigma0_;
  SymMatrix q_;
  Vec lower_, upper_;
  BlockPartition part_;
};

// Markov switching model posterior X_{1:n}, r(1..n) | Y_{1:n}. State blocks
// are the n continuous coordinates followed by the n regimes; d = 2n.
class MsmTarget : public Target {
 public:
  MsmTarget(Vec observations, double a1, double a2, double sigma0_sq,
            double sigma1_sq, double beta_sq);

  const BlockPartition& partition() const override { return part_; }
  ChainState initial_state(RngStream& rng) const override;
  void draw_block(ChainState& state, int block, RngStream& rng) const override;
  Vec adapt_vector(const ChainState& state) const override;
  int regime_count() const override { return n_; }

  int n_obs() const { return n_; }
  const Vec& observations() const { return y_; }

  // Full-conditional moments of X_i (i is 1-based) given everything else.
  std::pair<double, double> x_conditional(const ChainState& state, int i) const;
  // P(r(i) = 1 | everything else), i 1-based.
  double r_prob1(const ChainState& state, int i) const;

 private:
  Vec y_;
  double a1_, a2_, s0_, s1_, b2_;  // variances sigma_0^2, sigma_1^2, beta^2
  int n_;
  BlockPartition part_;

  double regime_var(int r) const { return r == 0 ? s0_ : s1_; }
  double log_trans(int from, int to) const;
  double log_stationary(int r) const;
};

// 2k-dimensional block-pair precision with Q_ii = [[1, rho_i], [rho_i, 1]].
SymMatrix make_example1(const Vec& rho);

// Arrowhead correlation matrix: unit diagonal, first row/column c, PD iff
// sqrt((d-1) c^2) < 1.
SymMatrix make_example2(int d, double c);

// Corr(0.01 I + v v^T) with v built from i.i.d. Beta(0.1, 0.2) draws;
// variant 2 divides entry i by log(i + 2).
SymMatrix make_tmvn_sigma(int d, int variant, std::uint64_t seed);

}  // namespace arsgs
