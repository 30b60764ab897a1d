#include "arsgs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arsgs {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec Matrix::column(int j) const {
  Vec c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

Vec Matrix::matvec(const Vec& x) const {
  Vec y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    const double* row = a_.data() + static_cast<std::size_t>(i) * cols_;
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

SymMatrix SymMatrix::from_entries(int dim, Vec entries) {
  if (dim < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
  if (entries.size() != static_cast<std::size_t>(dim) * dim)
    throw std::invalid_argument("SymMatrix: entry count does not match dim");
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double x = entries[static_cast<std::size_t>(i) * dim + j];
      const double y = entries[static_cast<std::size_t>(j) * dim + i];
      if (std::abs(x - y) > 1e-12 * std::max(1.0, std::abs(x)))
        throw std::invalid_argument("SymMatrix: entries are not symmetric");
    }
  }
  SymMatrix m;
  m.dim_ = dim;
  m.a_ = std::move(entries);
  // keep exact symmetry regardless of input roundoff
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const double v = 0.5 * (m.a_[static_cast<std::size_t>(i) * dim + j] +
                              m.a_[static_cast<std::size_t>(j) * dim + i]);
      m.a_[static_cast<std::size_t>(i) * dim + j] = v;
      m.a_[static_cast<std::size_t>(j) * dim + i] = v;
    }
  return m;
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(const Vec& d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m.set(static_cast<int>(i), static_cast<int>(i), d[i]);
  return m;
}

Vec SymMatrix::matvec(const Vec& x) const {
  Vec y(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    const double* row = a_.data() + static_cast<std::size_t>(i) * dim_;
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

double SymMatrix::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

void LowerTriangular::set(int i, int j, double v) {
  if (j > i) throw std::invalid_argument("LowerTriangular: above-diagonal write");
  a_[static_cast<std::size_t>(i) * dim_ + j] = v;
}

Vec LowerTriangular::matvec(const Vec& x) const {
  Vec y(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    const double* row = a_.data() + static_cast<std::size_t>(i) * dim_;
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec LowerTriangular::matvec_transpose(const Vec& x) const {
  Vec y(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    const double* row = a_.data() + static_cast<std::size_t>(i) * dim_;
    for (int j = 0; j <= i; ++j) y[j] += row[j] * x[i];
  }
  return y;
}

Vec LowerTriangular::solve_lower(const Vec& b) const {
  Vec y(dim_);
  for (int i = 0; i < dim_; ++i) {
    double s = b[i];
    const double* row = a_.data() + static_cast<std::size_t>(i) * dim_;
    for (int j = 0; j < i; ++j) s -= row[j] * y[j];
    y[i] = s / row[i];
  }
  return y;
}

Vec LowerTriangular::solve_upper_transpose(const Vec& b) const {
  Vec y(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < dim_; ++k) s -= (*this)(k, i) * y[k];
    y[i] = s / (*this)(i, i);
  }
  return y;
}

LowerTriangular cholesky(const SymMatrix& a) {
  const int n = a.dim();
  LowerTriangular l(n);
  for (int j = 0; j < n; ++j) {
    double sum_sq = 0.0;
    for (int k = 0; k < j; ++k) sum_sq += l(j, k) * l(j, k);
    const double diag = a(j, j) - sum_sq;
    if (!(diag > 0.0))
      throw NotPositiveDefinite("cholesky: non-positive pivot at column " +
                                std::to_string(j));
    const double root = std::sqrt(diag);
    l.set(j, j, root);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l.set(i, j, s / root);
    }
  }
  return l;
}

EigenDecomposition jacobi_eigen(const SymMatrix& a, int max_sweeps) {
  const int n = a.dim();
  Vec m = a.raw();  // working copy, full storage
  Matrix v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };
  const double fro = std::max(a.frobenius(), 1e-300);
  const double tol = 1e-12 * fro;

  bool converged = (n == 1);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * at(p, q) * at(p, q);
    if (std::sqrt(off) <= tol) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const double app = at(p, p), aqq = at(q, q);
        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(p, k) = at(k, p);
          at(k, q) = s * akp + c * akq;
          at(q, k) = at(k, q);
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    // final check after the last sweep
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * at(p, q) * at(p, q);
    if (std::sqrt(off) > tol)
      throw NoConvergence("jacobi_eigen: off-diagonal norm above tolerance after " +
                          std::to_string(max_sweeps) + " sweeps");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return at(i, i) < at(j, j); });

  EigenDecomposition ed;
  ed.values.resize(n);
  ed.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    ed.values[j] = at(order[j], order[j]);
    for (int i = 0; i < n; ++i) ed.vectors(i, j) = v(i, order[j]);
  }
  return ed;
}

SymMatrix sym_sqrt(const SymMatrix& a) {
  const EigenDecomposition ed = jacobi_eigen(a);
  const int n = a.dim();
  for (double lam : ed.values)
    if (lam <= 1e-14)
      throw NotPositiveDefinite("sym_sqrt: eigenvalue <= 1e-14");
  SymMatrix r(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += ed.vectors(i, k) * std::sqrt(ed.values[k]) * ed.vectors(j, k);
      r.set(i, j, s);
    }
  }
  return r;
}

SymMatrix invert_spd(const SymMatrix& a) {
  const int n = a.dim();
  const LowerTriangular l = cholesky(a);
  // columns of the inverse from L L^T x = e_i; the result is symmetrized
  // against solve roundoff
  Matrix cols(n, n);
  for (int i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    const Vec x = l.solve_upper_transpose(l.solve_lower(e));
    for (int j = 0; j < n; ++j) cols(j, i) = x[j];
  }
  return symmetrize_product(cols);
}

Vec power_step(const std::function<Vec(const Vec&)>& apply, const Vec& v,
               double b, RngStream& rng) {
  const Vec av = apply(v);
  const int n = static_cast<int>(av.size());
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Vec xi = rng.unit_sphere(n);
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = av[i] + b * xi[i];
    const double nrm = norm2(u);
    if (nrm >= 1e-300) {
      for (double& x : u) x /= nrm;
      return u;
    }
  }
  throw ZeroVector("power_step: vanishing iterate after one resample");
}

Matrix sym_to_matrix(const SymMatrix& a) {
  const int n = a.dim();
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
  return m;
}

SymMatrix symmetrize_product(const Matrix& m) {
  const int n = m.rows();
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

}  // namespace arsgs
