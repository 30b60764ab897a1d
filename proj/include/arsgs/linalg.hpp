#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "arsgs/errors.hpp"
#include "arsgs/rng.hpp"

namespace arsgs {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);

// Dense row-major rectangular matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  Vec column(int j) const;
  Vec matvec(const Vec& x) const;

 private:
  int rows_ = 0, cols_ = 0;
  Vec a_;
};

// Dense symmetric matrix, full row-major storage. Mutation goes through
// set(), which writes both triangles; construction from raw entries checks
// |a_ij - a_ji| <= 1e-12 * max(1, |a_ij|).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {
    if (dim < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
  }

  static SymMatrix from_entries(int dim, Vec entries);
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(const Vec& d);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  void set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * dim_ + j] = v;
    a_[static_cast<std::size_t>(j) * dim_ + i] = v;
  }

  const Vec& raw() const { return a_; }
  Vec matvec(const Vec& x) const;
  double frobenius() const;
  double max_abs() const;

 private:
  int dim_ = 0;
  Vec a_;
};

// Lower triangular with positive diagonal (Cholesky factors, the L_n(w) of
// the adaptation engine).
class LowerTriangular {
 public:
  LowerTriangular() = default;
  explicit LowerTriangular(int dim)
      : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, 0.0) {}

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  void set(int i, int j, double v);

  Vec matvec(const Vec& x) const;            // L x
  Vec matvec_transpose(const Vec& x) const;  // L^T x
  Vec solve_lower(const Vec& b) const;       // L y = b
  Vec solve_upper_transpose(const Vec& b) const;  // L^T y = b

 private:
  int dim_ = 0;
  Vec a_;
};

struct EigenDecomposition {
  Vec values;      // ascending
  Matrix vectors;  // column j is the eigenvector of values[j]
};

// Standard Cholesky factorization A = L L^T; throws NotPositiveDefinite on a
// non-positive pivot.
LowerTriangular cholesky(const SymMatrix& a);

// Cyclic Jacobi sweeps; full spectrum sorted ascending with orthonormal
// eigenvectors. Throws NoConvergence after max_sweeps.
EigenDecomposition jacobi_eigen(const SymMatrix& a, int max_sweeps = 100);

// Symmetric square root via the spectral decomposition; throws
// NotPositiveDefinite if any eigenvalue <= 1e-14.
SymMatrix sym_sqrt(const SymMatrix& a);

// SPD inverse via Cholesky.
SymMatrix invert_spd(const SymMatrix& a);

// One perturbed power-iteration step: normalize(apply(v) + b * xi) with xi a
// normalized standard Gaussian vector. On a vanishing result the perturbation
// is resampled once, then ZeroVector is thrown.
Vec power_step(const std::function<Vec(const Vec&)>& apply, const Vec& v,
               double b, RngStream& rng);

// Helpers shared by gapcore/adapt.
Matrix sym_to_matrix(const SymMatrix& a);
SymMatrix symmetrize_product(const Matrix& m);  // (M + M^T)/2 for square M
Matrix matmul(const Matrix& a, const Matrix& b);

}  // namespace arsgs
