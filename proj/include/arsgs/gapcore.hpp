#pragma once

#include <optional>
#include <utility>

#include "arsgs/blockmodel.hpp"

namespace arsgs {

struct GapReport {
  double gap_value = 0.0;  // lambda_min(D_p Q) recomputed at the weights
  SelectionProbabilities weights;
  int iterations = 0;
  bool converged = false;
  Vec w_final;  // unnormalized optimizer iterate the weights came from
};

// Gap(p) = 1 - lambda_max(F_1), F_1 = I - K (sum_i p_i D_i) K, K = sqrt(Q).
double gaussian_gap(const SymMatrix& q, const BlockPartition& part,
                    const SelectionProbabilities& p);

// PG(p) = lambda_min(D_p Q), evaluated through the symmetric similarity
// sqrt(Q) D_p sqrt(Q).
double pseudo_gap(const SymMatrix& q, const BlockPartition& part,
                  const SelectionProbabilities& p);

// f(w) = lambda_min(sqrt(Q^ext) D^ext_w sqrt(Q^ext)) for w in the open
// simplex (w_i > 0, sum w < 1). Exposed for the concavity/homogeneity
// property checks.
double extended_gap_objective(const SymMatrix& q, const BlockPartition& part,
                              const Vec& w);

// Subgradient ascent on f with an exact eigen-oracle. Steps a_m = 1/(m+10);
// converged once the iterate moves less than tol in sup-norm for 50
// consecutive iterations. Returns the normalized probabilities and the
// pseudo-spectral gap recomputed at them; converged=false if max_iter was
// exhausted first.
GapReport pseudo_optimal_exact(const SymMatrix& sigma,
                               const BlockPartition& part, double eps,
                               double tol = 1e-5, int max_iter = 100000,
                               const std::optional<Vec>& w0 = std::nullopt);

// Closed form for the 2x2-block pair target: alpha_i, p_{2i-1} = p_{2i} =
// alpha_i / 2, and the optimal pseudo-spectral gap.
std::pair<SelectionProbabilities, double> closed_form_pairs(const Vec& rho);

// Returns (PG(p), max_i(p_i / qvec_i) * PG(qvec)).
std::pair<double, double> upper_bound_check(const SymMatrix& q,
                                            const BlockPartition& part,
                                            const SelectionProbabilities& p,
                                            const SelectionProbabilities& qvec);

}  // namespace arsgs
