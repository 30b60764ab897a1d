#include "arsgs/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "arsgs/errors.hpp"

namespace arsgs {

double Target::log_conditional_ratio(const ChainState&, int, double) const {
  throw std::logic_error("target does not provide conditional density ratios");
}

// ---------------------------------------------------------------------------
// GaussianTarget

GaussianTarget::GaussianTarget(Vec mean, SymMatrix precision, BlockPartition part)
    : mean_(std::move(mean)), q_(std::move(precision)), part_(std::move(part)) {
  if (static_cast<int>(mean_.size()) != q_.dim() || part_.d() != q_.dim())
    throw std::invalid_argument("GaussianTarget: dimension mismatch");
  for (int i = 0; i < part_.s(); ++i) {
    const int r = part_.size(i), o = part_.offset(i);
    SymMatrix blk(r);
    for (int a = 0; a < r; ++a)
      for (int c = a; c < r; ++c) blk.set(a, c, q_(o + a, o + c));
    block_chol_.push_back(cholesky(blk));
  }
}

ChainState GaussianTarget::initial_state(RngStream& rng) const {
  ChainState st;
  st.x.resize(mean_.size());
  for (std::size_t i = 0; i < mean_.size(); ++i) st.x[i] = mean_[i] + rng.normal();
  return st;
}

std::pair<Vec, SymMatrix> GaussianTarget::conditional_moments(
    const ChainState& state, int block) const {
  const int r = part_.size(block), o = part_.offset(block);
  // g = Q_{i,-i} (x_{-i} - mu_{-i})
  Vec g(r, 0.0);
  for (int a = 0; a < r; ++a) {
    double s = 0.0;
    for (int j = 0; j < q_.dim(); ++j) {
      if (j >= o && j < o + r) continue;
      s += q_(o + a, j) * (state.x[j] - mean_[j]);
    }
    g[a] = s;
  }
  const LowerTriangular& l = block_chol_[block];
  const Vec t = l.solve_upper_transpose(l.solve_lower(g));  // Q_ii^-1 g
  Vec mean(r);
  for (int a = 0; a < r; ++a) mean[a] = mean_[o + a] - t[a];

  SymMatrix blk(r);
  for (int a = 0; a < r; ++a)
    for (int c = a; c < r; ++c) blk.set(a, c, q_(o + a, o + c));
  return {mean, invert_spd(blk)};
}

void GaussianTarget::draw_block(ChainState& state, int block,
                                RngStream& rng) const {
  const int r = part_.size(block), o = part_.offset(block);
  Vec g(r, 0.0);
  for (int a = 0; a < r; ++a) {
    double s = 0.0;
    for (int j = 0; j < q_.dim(); ++j) {
      if (j >= o && j < o + r) continue;
      s += q_(o + a, j) * (state.x[j] - mean_[j]);
    }
    g[a] = s;
  }
  const LowerTriangular& l = block_chol_[block];
  const Vec t = l.solve_upper_transpose(l.solve_lower(g));
  Vec z(r);
  for (int a = 0; a < r; ++a) z[a] = rng.normal();
  const Vec noise = l.solve_upper_transpose(z);  // cov = Q_ii^-1
  for (int a = 0; a < r; ++a) state.x[o + a] = mean_[o + a] - t[a] + noise[a];
}

double GaussianTarget::log_conditional_ratio(const ChainState& state, int coord,
                                             double proposal) const {
  const double delta = proposal - state.x[coord];
  double grad = 0.0;
  for (int j = 0; j < q_.dim(); ++j)
    grad += q_(coord, j) * (state.x[j] - mean_[j]);
  return -delta * grad - 0.5 * delta * delta * q_(coord, coord);
}

std::optional<SymMatrix> GaussianTarget::exact_sigma() const {
  return invert_spd(q_);
}

// ---------------------------------------------------------------------------
// TmvnTarget

TmvnTarget::TmvnTarget(SymMatrix sigma0, Vec lower, Vec upper)
    : sigma0_(std::move(sigma0)), lower_(std::move(lower)), upper_(std::move(upper)),
      part_(BlockPartition::coordinatewise(sigma0_.dim())) {
  const int d = sigma0_.dim();
  if (static_cast<int>(lower_.size()) != d || static_cast<int>(upper_.size()) != d)
    throw std::invalid_argument("TmvnTarget: bounds dimension mismatch");
  for (int i = 0; i < d; ++i)
    if (!(lower_[i] < upper_[i]))
      throw std::invalid_argument("TmvnTarget: need lower < upper");
  q_ = invert_spd(sigma0_);
}

ChainState TmvnTarget::initial_state(RngStream&) const {
  ChainState st;
  const int d = sigma0_.dim();
  st.x.resize(d);
  for (int i = 0; i < d; ++i) st.x[i] = 0.5 * (lower_[i] + upper_[i]);
  return st;
}

TmvnTarget::Conditional TmvnTarget::conditional(const ChainState& state,
                                                int coord) const {
  double g = 0.0;
  for (int j = 0; j < q_.dim(); ++j) {
    if (j == coord) continue;
    g += q_(coord, j) * state.x[j];
  }
  const double qii = q_(coord, coord);
  return {-g / qii, std::sqrt(1.0 / qii), lower_[coord], upper_[coord]};
}

void TmvnTarget::draw_block(ChainState& state, int coord, RngStream& rng) const {
  const Conditional c = conditional(state, coord);
  const double a = (c.lo - c.mean) / c.sd;
  const double b = (c.hi - c.mean) / c.sd;
  state.x[coord] = c.mean + c.sd * sample_truncated_std_normal(a, b, rng);
}

double TmvnTarget::log_conditional_ratio(const ChainState& state, int coord,
                                         double proposal) const {
  if (proposal < lower_[coord] || proposal > upper_[coord])
    return -std::numeric_limits<double>::infinity();
  const double delta = proposal - state.x[coord];
  double grad = 0.0;
  for (int j = 0; j < q_.dim(); ++j) grad += q_(coord, j) * state.x[j];
  return -delta * grad - 0.5 * delta * delta * q_(coord, coord);
}

// ---------------------------------------------------------------------------
// MsmTarget

MsmTarget::MsmTarget(Vec observations, double a1, double a2, double sigma0_sq,
                     double sigma1_sq, double beta_sq)
    : y_(std::move(observations)), a1_(a1), a2_(a2), s0_(sigma0_sq),
      s1_(sigma1_sq), b2_(beta_sq), n_(static_cast<int>(y_.size())),
      part_(BlockPartition::coordinatewise(2 * static_cast<int>(y_.size()))) {
  if (n_ < 2) throw std::invalid_argument("MsmTarget: need at least 2 observations");
  if (!(a1 > 0.0 && a1 < 1.0 && a2 > 0.0 && a2 < 1.0))
    throw std::invalid_argument("MsmTarget: switching probabilities in (0,1)");
  if (!(s0_ > 0.0 && s1_ > 0.0 && b2_ > 0.0))
    throw std::invalid_argument("MsmTarget: variances must be positive");
}

double MsmTarget::log_trans(int from, int to) const {
  const double p = from == 0 ? (to == 0 ? 1.0 - a1_ : a1_)
                             : (to == 0 ? a2_ : 1.0 - a2_);
  return std::log(p);
}

double MsmTarget::log_stationary(int r) const {
  return std::log(r == 0 ? a2_ / (a1_ + a2_) : a1_ / (a1_ + a2_));
}

ChainState MsmTarget::initial_state(RngStream&) const {
  ChainState st;
  st.x = y_;
  st.regimes.assign(n_, 0);
  return st;
}

std::pair<double, double> MsmTarget::x_conditional(const ChainState& state,
                                                   int i) const {
  const double vr_i = regime_var(state.regimes[i - 1]);
  const double vr_next = i < n_ ? regime_var(state.regimes[i]) : 1.0;
  double prec = 1.0 / b2_;
  double num = y_[i - 1] / b2_;
  if (i > 1) {
    prec += 1.0 / vr_i;
    num += state.x[i - 2] / vr_i;
  }
  if (i < n_) {
    prec += 1.0 / vr_next;
    num += state.x[i] / vr_next;
  }
  const double var = 1.0 / prec;
  return {var * num, var};
}

double MsmTarget::r_prob1(const ChainState& state, int i) const {
  double lw[2];
  for (int k = 0; k < 2; ++k) {
    double v = i == 1 ? log_stationary(k) : log_trans(state.regimes[i - 2], k);
    if (i < n_) v += log_trans(k, state.regimes[i]);
    if (i >= 2) {
      const double var = regime_var(k);
      const double diff = state.x[i - 1] - state.x[i - 2];
      v += -0.5 * std::log(var) - 0.5 * diff * diff / var;
    }
    lw[k] = v;
  }
  return 1.0 / (1.0 + std::exp(lw[0] - lw[1]));
}

void MsmTarget::draw_block(ChainState& state, int block, RngStream& rng) const {
  if (block < n_) {
    const auto [mu, var] = x_conditional(state, block + 1);
    state.x[block] = mu + std::sqrt(var) * rng.normal();
  } else {
    const int i = block - n_ + 1;
    state.regimes[i - 1] = rng.uniform() < r_prob1(state, i) ? 1 : 0;
  }
}

Vec MsmTarget::adapt_vector(const ChainState& state) const {
  Vec v(2 * n_);
  for (int i = 0; i < n_; ++i) v[i] = state.x[i];
  for (int i = 0; i < n_; ++i) v[n_ + i] = static_cast<double>(state.regimes[i]);
  return v;
}

// ---------------------------------------------------------------------------
// Generators

SymMatrix make_example1(const Vec& rho) {
  const int k = static_cast<int>(rho.size());
  if (k < 1) throw std::invalid_argument("make_example1: empty rho");
  SymMatrix q(2 * k);
  for (int i = 0; i < k; ++i) {
    if (!(rho[i] >= 0.0 && rho[i] < 1.0))
      throw std::invalid_argument("make_example1: need 0 <= rho < 1");
    q.set(2 * i, 2 * i, 1.0);
    q.set(2 * i + 1, 2 * i + 1, 1.0);
    q.set(2 * i, 2 * i + 1, rho[i]);
  }
  return q;
}

SymMatrix make_example2(int d, double c) {
  if (d < 2) throw std::invalid_argument("make_example2: need d >= 2");
  if (c < 0.0) throw std::invalid_argument("make_example2: need c >= 0");
  const double lambda_min = 1.0 - std::sqrt((d - 1) * c * c);
  if (!(lambda_min > 0.0))
    throw NotPositiveDefinite("make_example2: 1 - sqrt(sum c_i^2) <= 0");
  SymMatrix m = SymMatrix::identity(d);
  for (int i = 1; i < d; ++i) m.set(0, i, c);
  return m;
}

namespace {

// Marsaglia-Tsang, with the alpha < 1 boost.
double gamma_draw(double alpha, RngStream& rng) {
  if (alpha < 1.0) {
    const double u = 1.0 - rng.uniform();
    return gamma_draw(alpha + 1.0, rng) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double beta_draw(double a, double b, RngStream& rng) {
  const double g1 = gamma_draw(a, rng);
  const double g2 = gamma_draw(b, rng);
  return g1 / (g1 + g2);
}

}  // namespace

SymMatrix make_tmvn_sigma(int d, int variant, std::uint64_t seed) {
  if (variant != 1 && variant != 2)
    throw std::invalid_argument("make_tmvn_sigma: variant must be 1 or 2");
  RngStream rng(seed);
  Vec v(d);
  for (int i = 0; i < d; ++i) {
    const double xi = beta_draw(0.1, 0.2, rng);
    v[i] = variant == 1 ? xi : xi / std::log(static_cast<double>(i + 2));
  }
  SymMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m.set(i, j, (i == j ? 0.01 : 0.0) + v[i] * v[j]);
  SymMatrix corr(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      corr.set(i, j, m(i, j) / std::sqrt(m(i, i) * m(j, j)));
  return corr;
}

}  // namespace arsgs
