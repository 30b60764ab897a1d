#pragma once

#include <vector>

#include "arsgs/linalg.hpp"

namespace arsgs {

// Split of d coordinates into s Gibbs blocks of sizes r_1..r_s.
struct BlockPartition {
  std::vector<int> sizes;
  std::vector<int> offsets;  // offsets[i] = start of block i, offsets[s] = d

  static BlockPartition coordinatewise(int d);
  static BlockPartition from_sizes(std::vector<int> sizes);

  int d() const { return offsets.back(); }
  int s() const { return static_cast<int>(sizes.size()); }
  int size(int i) const { return sizes[i]; }
  int offset(int i) const { return offsets[i]; }
};

// A point w in the contracted simplex: w_i >= eps, 1 - sum(w) >= eps,
// 0 < eps < 1/(s+1). Feasibility is checked with a 1e-12 absolute slack so
// boundary points produced by the projection round-trip unchanged.
class WeightVector {
 public:
  WeightVector(Vec w, double eps);

  const Vec& values() const { return w_; }
  double epsilon() const { return eps_; }
  int s() const { return static_cast<int>(w_.size()); }
  double sum() const;

 private:
  Vec w_;
  double eps_;
};

class SelectionProbabilities {
 public:
  explicit SelectionProbabilities(Vec p);  // must sum to 1 within 1e-12, all > 0
  static SelectionProbabilities uniform(int s);
  static SelectionProbabilities from_raw(const Vec& raw);  // normalizes

  const Vec& values() const { return p_; }
  int s() const { return static_cast<int>(p_.size()); }

 private:
  Vec p_;
};

// p_j = w_j / sum(w); preserves component ordering.
SelectionProbabilities normalize(const WeightVector& w);

// Streaming mean/scatter accumulator reproducing the batch estimator
// (1/n)(sum X_i X_i^T - (n+1) Xbar Xbar^T) over the n+1 points seen, plus an
// optional ridge on emission.
class CovarianceEstimate {
 public:
  explicit CovarianceEstimate(int dim, double ridge = 0.0);

  void update(const Vec& x);
  long count() const { return n_; }
  int dim() const { return dim_; }
  double ridge() const { return ridge_; }
  bool has_estimate() const { return n_ >= 2; }
  const Vec& mean() const { return mean_; }

  SymMatrix sigma_hat() const;  // requires has_estimate()

 private:
  int dim_;
  double ridge_;
  long n_ = 0;
  Vec mean_;
  Vec scatter_;  // sum (x - mean)(x - mean)^T, full row-major
};

// D_p = diag(p_1 Q_11^-1, ..., p_s Q_ss^-1). Throws SingularBlock if a
// diagonal block of q is not positive definite.
SymMatrix build_d_p(const SymMatrix& q, const BlockPartition& part,
                    const SelectionProbabilities& p);

// D_i = diag(0, .., Q_ii^-1, .., 0).
SymMatrix build_d_i(const SymMatrix& q, const BlockPartition& part, int i);

// Diagonal of R_i(w): 1/w_i on block i, -1/(1 - sum w) at position d+1,
// zero elsewhere. Returned as the (d+1)-vector of diagonal entries.
Vec build_r_i(const WeightVector& w, const BlockPartition& part, int i);

// The (d+1)-dimensional bordered matrices of the adaptation engine, plus the
// Cholesky factor L(w) of (D^ext(w))^-1 and the two power-iteration maps.
struct ExtendedMatrices {
  BlockPartition part;
  Vec w;              // weights the factorization was built at
  double w_sum = 0.0;
  SymMatrix sigma_ext;                 // diag(Sigma_hat, 1)
  SymMatrix q_ext;                     // diag(Q_hat, 1)
  std::vector<SymMatrix> q_blocks;     // Q_hat_ii
  std::vector<SymMatrix> q_block_inv;  // (Q_hat_ii)^-1
  LowerTriangular l;                   // chol((D^ext(w))^-1)

  SymMatrix d_ext() const;             // D^ext(w) = diag(D_w, 1 - sum w)
  Vec apply_z_map(const Vec& z) const;  // L^T Sigma^ext L z
  Vec apply_y_map(const Vec& y) const;  // (D^ext)^-1 Sigma^ext y
};

ExtendedMatrices extend(const SymMatrix& sigma_hat, const SymMatrix& q_hat,
                        const BlockPartition& part, const WeightVector& w);

}  // namespace arsgs
