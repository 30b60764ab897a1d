#include "arsgs/gapcore.hpp"

#include <algorithm>
#include <cmath>

#include "arsgs/adapt.hpp"

namespace arsgs {

namespace {

// Shared precomputation for repeated evaluations of
// M(w) = sqrt(Q^ext) D^ext_w sqrt(Q^ext).
struct ExtendedOracle {
  BlockPartition part;
  Matrix k_ext;                        // sqrt(diag(Q, 1))
  std::vector<SymMatrix> q_block_inv;  // (Q_ii)^-1

  ExtendedOracle(const SymMatrix& q, const BlockPartition& p) : part(p) {
    const int d = part.d();
    SymMatrix q_ext(d + 1);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) q_ext.set(i, j, q(i, j));
    q_ext.set(d, d, 1.0);
    k_ext = sym_to_matrix(sym_sqrt(q_ext));
    for (int i = 0; i < part.s(); ++i) {
      const int r = part.size(i), o = part.offset(i);
      SymMatrix blk(r);
      for (int a = 0; a < r; ++a)
        for (int c = a; c < r; ++c) blk.set(a, c, q(o + a, o + c));
      q_block_inv.push_back(invert_spd(blk));
    }
  }

  SymMatrix build_m(const Vec& w) const {
    const int d = part.d();
    Matrix dm(d + 1, d + 1);
    double w_sum = 0.0;
    for (int i = 0; i < part.s(); ++i) {
      const int r = part.size(i), o = part.offset(i);
      for (int a = 0; a < r; ++a)
        for (int c = 0; c < r; ++c) dm(o + a, o + c) = w[i] * q_block_inv[i](a, c);
      w_sum += w[i];
    }
    dm(d, d) = 1.0 - w_sum;
    return symmetrize_product(matmul(k_ext, matmul(dm, k_ext)));
  }

  // f(w), the minimum eigenvector's image u = K x, and the supergradient
  // components <dD^ext/dw_i u, u> = u_i' Q_ii^-1 u_i - u_{d+1}^2.
  double f_and_supergradient(const Vec& w, Vec* grad) const {
    const EigenDecomposition ed = jacobi_eigen(build_m(w));
    if (grad) {
      const Vec u = k_ext.matvec(ed.vectors.column(0));
      const int d = part.d();
      grad->assign(part.s(), 0.0);
      for (int i = 0; i < part.s(); ++i) {
        const int r = part.size(i), o = part.offset(i);
        double quad = 0.0;
        for (int a = 0; a < r; ++a)
          for (int c = 0; c < r; ++c)
            quad += u[o + a] * q_block_inv[i](a, c) * u[o + c];
        (*grad)[i] = quad - u[d] * u[d];
      }
    }
    return ed.values[0];
  }
};

double step_size(int m, int d) {
  const double c = 50.0 * std::sqrt(static_cast<double>(d)) + static_cast<double>(m);
  return std::log(c) / c;
}

}  // namespace

double gaussian_gap(const SymMatrix& q, const BlockPartition& part,
                    const SelectionProbabilities& p) {
  const int d = part.d();
  const SymMatrix k = sym_sqrt(q);
  // sum_i p_i D_i assembled term by term per the Amit representation
  SymMatrix dsum(d);
  for (int i = 0; i < part.s(); ++i) {
    const SymMatrix di = build_d_i(q, part, i);
    for (int a = 0; a < d; ++a)
      for (int c = a; c < d; ++c)
        dsum.set(a, c, dsum(a, c) + p.values()[i] * di(a, c));
  }
  const Matrix km = sym_to_matrix(k);
  const SymMatrix kdk = symmetrize_product(matmul(km, matmul(sym_to_matrix(dsum), km)));
  SymMatrix f1(d);
  for (int a = 0; a < d; ++a)
    for (int c = a; c < d; ++c) f1.set(a, c, (a == c ? 1.0 : 0.0) - kdk(a, c));
  const EigenDecomposition ed = jacobi_eigen(f1);
  return 1.0 - ed.values.back();
}

double pseudo_gap(const SymMatrix& q, const BlockPartition& part,
                  const SelectionProbabilities& p) {
  const SymMatrix k = sym_sqrt(q);
  const SymMatrix dp = build_d_p(q, part, p);
  const Matrix km = sym_to_matrix(k);
  const SymMatrix m = symmetrize_product(matmul(km, matmul(sym_to_matrix(dp), km)));
  return jacobi_eigen(m).values[0];
}

double extended_gap_objective(const SymMatrix& q, const BlockPartition& part,
                              const Vec& w) {
  ExtendedOracle oracle(q, part);
  return oracle.f_and_supergradient(w, nullptr);
}

GapReport pseudo_optimal_exact(const SymMatrix& sigma,
                               const BlockPartition& part, double eps,
                               double tol, int max_iter,
                               const std::optional<Vec>& w0) {
  const int s = part.s();
  if (!(eps > 0.0) || eps >= 1.0 / (s + 1))
    throw InvalidEpsilon("pseudo_optimal_exact: need 0 < eps < 1/(s+1)");
  const SymMatrix q = invert_spd(sigma);
  ExtendedOracle oracle(q, part);

  Vec w = w0 ? project_simplex_eps(*w0, eps).values()
             : Vec(s, 1.0 / (s + 1));
  int iterations = 0;
  int stable = 0;
  bool converged = false;
  Vec grad(s);
  for (int m = 1; m <= max_iter; ++m) {
    iterations = m;
    oracle.f_and_supergradient(w, &grad);
    double l1 = 0.0;
    for (double g : grad) l1 += std::abs(g);
    if (l1 < 1e-300) {
      converged = true;  // flat supergradient, nothing to move
      break;
    }
    Vec w_new(s);
    const double a = step_size(m, part.d());
    for (int j = 0; j < s; ++j) w_new[j] = w[j] + a * grad[j] / l1;
    const Vec projected = project_simplex_eps(w_new, eps).values();
    double delta = 0.0;
    for (int j = 0; j < s; ++j) delta = std::max(delta, std::abs(projected[j] - w[j]));
    w = projected;
    stable = (delta < tol) ? stable + 1 : 0;
    if (stable >= 50) {
      converged = true;
      break;
    }
  }

  GapReport report{0.0, SelectionProbabilities::from_raw(w), iterations,
                   converged, w};
  report.gap_value = pseudo_gap(q, part, report.weights);
  return report;
}

std::pair<SelectionProbabilities, double> closed_form_pairs(const Vec& rho) {
  const int k = static_cast<int>(rho.size());
  if (k < 1) throw std::invalid_argument("closed_form_pairs: empty rho");
  for (double r : rho)
    if (!(r >= 0.0 && r < 1.0))
      throw std::invalid_argument("closed_form_pairs: need 0 <= rho < 1");

  Vec prod_excl(k, 1.0);
  double full_prod = 1.0;
  for (int l = 0; l < k; ++l) full_prod *= 1.0 - rho[l];
  double denom = 0.0;
  for (int l = 0; l < k; ++l) {
    double p = 1.0;
    for (int j = 0; j < k; ++j)
      if (j != l) p *= 1.0 - rho[j];
    prod_excl[l] = p;
    denom += p;
  }

  Vec p(2 * k);
  for (int i = 0; i < k; ++i) {
    const double alpha = prod_excl[i] / denom;
    p[2 * i] = alpha / 2.0;
    p[2 * i + 1] = alpha / 2.0;
  }
  const double pg = full_prod / (2.0 * denom);
  return {SelectionProbabilities::from_raw(p), pg};
}

std::pair<double, double> upper_bound_check(const SymMatrix& q,
                                            const BlockPartition& part,
                                            const SelectionProbabilities& p,
                                            const SelectionProbabilities& qvec) {
  double ratio = 0.0;
  for (int i = 0; i < p.s(); ++i)
    ratio = std::max(ratio, p.values()[i] / qvec.values()[i]);
  return {pseudo_gap(q, part, p), ratio * pseudo_gap(q, part, qvec)};
}

}  // namespace arsgs
