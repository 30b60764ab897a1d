#include "arsgs/blockmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace arsgs {

BlockPartition BlockPartition::coordinatewise(int d) {
  return from_sizes(std::vector<int>(d, 1));
}

BlockPartition BlockPartition::from_sizes(std::vector<int> sizes) {
  if (sizes.empty()) throw std::invalid_argument("BlockPartition: no blocks");
  BlockPartition p;
  p.offsets.resize(sizes.size() + 1);
  p.offsets[0] = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1)
      throw std::invalid_argument("BlockPartition: block size must be >= 1");
    p.offsets[i + 1] = p.offsets[i] + sizes[i];
  }
  p.sizes = std::move(sizes);
  return p;
}

namespace {
constexpr double kFeasSlack = 1e-12;
}

WeightVector::WeightVector(Vec w, double eps) : w_(std::move(w)), eps_(eps) {
  const int s = static_cast<int>(w_.size());
  if (s < 1) throw std::invalid_argument("WeightVector: empty");
  if (!(eps > 0.0) || eps >= 1.0 / (s + 1))
    throw InvalidEpsilon("WeightVector: eps must satisfy 0 < eps < 1/(s+1)");
  double sum = 0.0;
  for (double x : w_) {
    if (x < eps - kFeasSlack)
      throw std::invalid_argument("WeightVector: component below eps");
    sum += x;
  }
  if (1.0 - sum < eps - kFeasSlack)
    throw std::invalid_argument("WeightVector: residual mass below eps");
}

double WeightVector::sum() const {
  return std::accumulate(w_.begin(), w_.end(), 0.0);
}

SelectionProbabilities::SelectionProbabilities(Vec p) : p_(std::move(p)) {
  if (p_.empty()) throw std::invalid_argument("SelectionProbabilities: empty");
  double sum = 0.0;
  for (double x : p_) {
    if (!(x > 0.0))
      throw std::invalid_argument("SelectionProbabilities: component <= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("SelectionProbabilities: sum != 1");
}

SelectionProbabilities SelectionProbabilities::uniform(int s) {
  Vec p(s, 1.0 / s);
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  p.back() += 1.0 - sum;
  return SelectionProbabilities(std::move(p));
}

SelectionProbabilities SelectionProbabilities::from_raw(const Vec& raw) {
  double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (!(sum > 0.0))
    throw std::invalid_argument("SelectionProbabilities: nonpositive total");
  Vec p(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) p[i] = raw[i] / sum;
  const double resum = std::accumulate(p.begin(), p.end(), 0.0);
  p.back() += 1.0 - resum;
  return SelectionProbabilities(std::move(p));
}

SelectionProbabilities normalize(const WeightVector& w) {
  return SelectionProbabilities::from_raw(w.values());
}

CovarianceEstimate::CovarianceEstimate(int dim, double ridge)
    : dim_(dim), ridge_(ridge), mean_(dim, 0.0),
      scatter_(static_cast<std::size_t>(dim) * dim, 0.0) {
  if (dim < 1) throw std::invalid_argument("CovarianceEstimate: dim >= 1");
  if (ridge < 0.0) throw std::invalid_argument("CovarianceEstimate: ridge < 0");
}

void CovarianceEstimate::update(const Vec& x) {
  if (x.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("CovarianceEstimate: dimension mismatch");
  ++n_;
  Vec delta(dim_);
  for (int i = 0; i < dim_; ++i) delta[i] = x[i] - mean_[i];
  for (int i = 0; i < dim_; ++i) mean_[i] += delta[i] / static_cast<double>(n_);
  // scatter += delta * (x - new_mean)^T, symmetric by pairing
  for (int i = 0; i < dim_; ++i) {
    const double di = delta[i];
    double* row = scatter_.data() + static_cast<std::size_t>(i) * dim_;
    for (int j = 0; j < dim_; ++j) row[j] += di * (x[j] - mean_[j]);
  }
}

SymMatrix CovarianceEstimate::sigma_hat() const {
  if (!has_estimate())
    throw std::logic_error("CovarianceEstimate: fewer than two samples");
  SymMatrix s(dim_);
  const double inv = 1.0 / static_cast<double>(n_ - 1);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      const double a = scatter_[static_cast<std::size_t>(i) * dim_ + j];
      const double b = scatter_[static_cast<std::size_t>(j) * dim_ + i];
      s.set(i, j, 0.5 * (a + b) * inv + (i == j ? ridge_ : 0.0));
    }
  return s;
}

namespace {

SymMatrix block_of(const SymMatrix& q, const BlockPartition& part, int i) {
  const int r = part.size(i), o = part.offset(i);
  SymMatrix b(r);
  for (int a = 0; a < r; ++a)
    for (int c = a; c < r; ++c) b.set(a, c, q(o + a, o + c));
  return b;
}

SymMatrix invert_block(const SymMatrix& q, const BlockPartition& part, int i) {
  try {
    return invert_spd(block_of(q, part, i));
  } catch (const NotPositiveDefinite&) {
    throw SingularBlock("diagonal block " + std::to_string(i) +
                        " of Q is not positive definite");
  }
}

}  // namespace

SymMatrix build_d_p(const SymMatrix& q, const BlockPartition& part,
                    const SelectionProbabilities& p) {
  if (q.dim() != part.d() || p.s() != part.s())
    throw std::invalid_argument("build_d_p: dimension mismatch");
  SymMatrix d(part.d());
  for (int i = 0; i < part.s(); ++i) {
    const SymMatrix inv = invert_block(q, part, i);
    const int r = part.size(i), o = part.offset(i);
    for (int a = 0; a < r; ++a)
      for (int c = a; c < r; ++c)
        d.set(o + a, o + c, p.values()[i] * inv(a, c));
  }
  return d;
}

SymMatrix build_d_i(const SymMatrix& q, const BlockPartition& part, int i) {
  if (q.dim() != part.d() || i < 0 || i >= part.s())
    throw std::invalid_argument("build_d_i: bad arguments");
  SymMatrix d(part.d());
  const SymMatrix inv = invert_block(q, part, i);
  const int r = part.size(i), o = part.offset(i);
  for (int a = 0; a < r; ++a)
    for (int c = a; c < r; ++c) d.set(o + a, o + c, inv(a, c));
  return d;
}

Vec build_r_i(const WeightVector& w, const BlockPartition& part, int i) {
  if (w.s() != part.s() || i < 0 || i >= part.s())
    throw std::invalid_argument("build_r_i: bad arguments");
  Vec diag(part.d() + 1, 0.0);
  const double wi = w.values()[i];
  for (int a = part.offset(i); a < part.offset(i) + part.size(i); ++a)
    diag[a] = 1.0 / wi;
  diag[part.d()] = -1.0 / (1.0 - w.sum());
  return diag;
}

SymMatrix ExtendedMatrices::d_ext() const {
  const int d = part.d();
  SymMatrix m(d + 1);
  for (int i = 0; i < part.s(); ++i) {
    const int r = part.size(i), o = part.offset(i);
    for (int a = 0; a < r; ++a)
      for (int c = a; c < r; ++c) m.set(o + a, o + c, w[i] * q_block_inv[i](a, c));
  }
  m.set(d, d, 1.0 - w_sum);
  return m;
}

Vec ExtendedMatrices::apply_z_map(const Vec& z) const {
  Vec t = l.matvec(z);
  Vec u = sigma_ext.matvec(t);
  return l.matvec_transpose(u);
}

Vec ExtendedMatrices::apply_y_map(const Vec& y) const {
  const int d = part.d();
  Vec u = sigma_ext.matvec(y);
  Vec out(d + 1, 0.0);
  // (D^ext)^-1 is block diagonal with blocks (1/w_i) Q_ii and 1/(1 - sum w)
  for (int i = 0; i < part.s(); ++i) {
    const int r = part.size(i), o = part.offset(i);
    for (int a = 0; a < r; ++a) {
      double s = 0.0;
      for (int c = 0; c < r; ++c) s += q_blocks[i](a, c) * u[o + c];
      out[o + a] = s / w[i];
    }
  }
  out[d] = u[d] / (1.0 - w_sum);
  return out;
}

ExtendedMatrices extend(const SymMatrix& sigma_hat, const SymMatrix& q_hat,
                        const BlockPartition& part, const WeightVector& w) {
  const int d = part.d();
  if (sigma_hat.dim() != d || q_hat.dim() != d || w.s() != part.s())
    throw std::invalid_argument("extend: dimension mismatch");

  ExtendedMatrices ext;
  ext.part = part;
  ext.w = w.values();
  ext.w_sum = w.sum();

  ext.sigma_ext = SymMatrix(d + 1);
  ext.q_ext = SymMatrix(d + 1);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      ext.sigma_ext.set(i, j, sigma_hat(i, j));
      ext.q_ext.set(i, j, q_hat(i, j));
    }
  ext.sigma_ext.set(d, d, 1.0);
  ext.q_ext.set(d, d, 1.0);

  // L(w) is block diagonal: chol((1/w_i) Q_ii) per block and
  // sqrt(1/(1 - sum w)) in the corner.
  ext.l = LowerTriangular(d + 1);
  for (int i = 0; i < part.s(); ++i) {
    SymMatrix qb = block_of(q_hat, part, i);
    ext.q_blocks.push_back(qb);
    try {
      ext.q_block_inv.push_back(invert_spd(qb));
    } catch (const NotPositiveDefinite&) {
      throw SingularBlock("extend: block " + std::to_string(i) +
                          " of Q_hat is not positive definite");
    }
    const int r = part.size(i), o = part.offset(i);
    SymMatrix scaled(r);
    for (int a = 0; a < r; ++a)
      for (int c = a; c < r; ++c) scaled.set(a, c, qb(a, c) / w.values()[i]);
    const LowerTriangular lb = cholesky(scaled);
    for (int a = 0; a < r; ++a)
      for (int c = 0; c <= a; ++c) ext.l.set(o + a, o + c, lb(a, c));
  }
  ext.l.set(d, d, std::sqrt(1.0 / (1.0 - ext.w_sum)));
  return ext;
}

}  // namespace arsgs
