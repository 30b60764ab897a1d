#include "arsgs/linalg.hpp"

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

using namespace arsgs;

namespace {

double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

SymMatrix square_of(const SymMatrix& a) {
  const Matrix m = matmul(sym_to_matrix(a), sym_to_matrix(a));
  return symmetrize_product(m);
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("cholesky identities") {
  const LowerTriangular l1 = cholesky(SymMatrix::identity(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= i; ++j) CHECK(l1(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));

  const LowerTriangular l2 = cholesky(SymMatrix::diagonal({4.0, 9.0}));
  CHECK(l2(0, 0) == doctest::Approx(2.0));
  CHECK(l2(1, 1) == doctest::Approx(3.0));

  const SymMatrix a = SymMatrix::from_entries(2, {4, 2, 2, 5});
  const LowerTriangular l = cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
  // L L^T reproduces a
  CHECK(l(0, 0) * l(0, 0) == doctest::Approx(4.0));
  CHECK(l(1, 0) * l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 0) * l(1, 0) + l(1, 1) * l(1, 1) == doctest::Approx(5.0));
}

TEST_CASE("cholesky rejects indefinite input") {
  CHECK_THROWS_AS(cholesky(SymMatrix::from_entries(2, {1, 2, 2, 1})),
                  NotPositiveDefinite);
  CHECK_THROWS_AS(cholesky(SymMatrix::diagonal({1.0, 0.0})), NotPositiveDefinite);
}

TEST_CASE("jacobi_eigen small spectra") {
  const EigenDecomposition d3 = jacobi_eigen(SymMatrix::diagonal({3.0, 1.0, 2.0}));
  CHECK(d3.values[0] == doctest::Approx(1.0));
  CHECK(d3.values[1] == doctest::Approx(2.0));
  CHECK(d3.values[2] == doctest::Approx(3.0));

  const EigenDecomposition offdiag = jacobi_eigen(SymMatrix::from_entries(2, {0, 1, 1, 0}));
  CHECK(offdiag.values[0] == doctest::Approx(-1.0));
  CHECK(offdiag.values[1] == doctest::Approx(1.0));

  const EigenDecomposition m = jacobi_eigen(SymMatrix::from_entries(2, {2, 1, 1, 2}));
  CHECK(m.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi_eigen orthogonality and reconstruction") {
  RngStream rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform() * 7);
    const SymMatrix a = oracles::random_spd(d, rng, 0.1);
    const EigenDecomposition ed = jacobi_eigen(a);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double dot_ij = dot(ed.vectors.column(i), ed.vectors.column(j));
        CHECK(std::abs(dot_ij - (i == j ? 1.0 : 0.0)) < 1e-10);
      }
    // A = V diag(values) V^T
    double err = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k)
          s += ed.vectors(i, k) * ed.values[k] * ed.vectors(j, k);
        err = std::max(err, std::abs(s - a(i, j)));
      }
    CHECK(err <= 1e-9 * std::max(1.0, a.max_abs()));
  }
}

TEST_CASE("sym_sqrt") {
  CHECK(max_abs_diff(sym_sqrt(SymMatrix::identity(4)), SymMatrix::identity(4)) < 1e-12);
  CHECK(max_abs_diff(sym_sqrt(SymMatrix::diagonal({4.0, 16.0})),
                     SymMatrix::diagonal({2.0, 4.0})) < 1e-12);
  const SymMatrix a = SymMatrix::from_entries(2, {2, 1, 1, 2});
  CHECK(max_abs_diff(square_of(sym_sqrt(a)), a) < 1e-12);
  CHECK_THROWS_AS(sym_sqrt(SymMatrix::diagonal({1.0, -1.0})), NotPositiveDefinite);
}

TEST_CASE("invert_spd") {
  CHECK(max_abs_diff(invert_spd(SymMatrix::identity(3)), SymMatrix::identity(3)) < 1e-14);
  CHECK(max_abs_diff(invert_spd(SymMatrix::diagonal({2.0, 4.0})),
                     SymMatrix::diagonal({0.5, 0.25})) < 1e-14);
  const SymMatrix corr = SymMatrix::from_entries(2, {1, 0.5, 0.5, 1});
  const SymMatrix inv = invert_spd(corr);
  CHECK(inv(0, 0) == doctest::Approx(1.0 / 0.75).epsilon(1e-12));
  CHECK(inv(0, 1) == doctest::Approx(-0.5 / 0.75).epsilon(1e-12));
  CHECK_THROWS_AS(invert_spd(SymMatrix::from_entries(2, {1, 2, 2, 1})),
                  NotPositiveDefinite);
}

TEST_CASE("spd round-trip properties") {
  RngStream rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform() * 7);
    const SymMatrix a = oracles::random_spd(d, rng);
    const double scale = std::max(1.0, a.max_abs());

    CHECK(max_abs_diff(square_of(sym_sqrt(a)), a) < 1e-8 * scale);

    const LowerTriangular l = cholesky(a);
    SymMatrix llt(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k <= std::min(i, j); ++k) s += l(i, k) * l(j, k);
        llt.set(i, j, s);
      }
    CHECK(max_abs_diff(llt, a) < 1e-8 * scale);

    const Matrix prod = matmul(sym_to_matrix(invert_spd(a)), sym_to_matrix(a));
    double err = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        err = std::max(err, std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
    CHECK(err < 1e-7);
  }
}

TEST_CASE("AB and BA share eigenvalues") {
  RngStream rng(101);
  // SPD route through the symmetric similarities
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform() * 5);
    const SymMatrix a = oracles::random_spd(d, rng);
    const SymMatrix b = oracles::random_spd(d, rng);
    const Matrix ra = sym_to_matrix(sym_sqrt(a));
    const Matrix rb = sym_to_matrix(sym_sqrt(b));
    const EigenDecomposition e1 =
        jacobi_eigen(symmetrize_product(matmul(ra, matmul(sym_to_matrix(b), ra))));
    const EigenDecomposition e2 =
        jacobi_eigen(symmetrize_product(matmul(rb, matmul(sym_to_matrix(a), rb))));
    for (int i = 0; i < d; ++i)
      CHECK(std::abs(e1.values[i] - e2.values[i]) < 1e-8);
  }
  // general route: characteristic polynomials of AB and BA for dim <= 3
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform() * 2);
    Matrix a(d, d), b(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        a(i, j) = rng.normal();
        b(i, j) = rng.normal();
      }
    const Vec ca = oracles::char_poly_coeffs(matmul(a, b));
    const Vec cb = oracles::char_poly_coeffs(matmul(b, a));
    for (std::size_t i = 0; i < ca.size(); ++i)
      CHECK(std::abs(ca[i] - cb[i]) < 1e-8);
  }
}

TEST_CASE("power_step fixed points and convergence") {
  RngStream rng(5);
  auto diag_map = [](Vec lambda) {
    return [lambda](const Vec& v) {
      Vec out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = lambda[i] * v[i];
      return out;
    };
  };

  const Vec fixed = power_step(diag_map({3.0, 1.0}), {1.0, 0.0}, 0.0, rng);
  CHECK(fixed[0] == doctest::Approx(1.0));
  CHECK(fixed[1] == doctest::Approx(0.0));

  Vec v = {std::sqrt(0.5), std::sqrt(0.5)};
  for (int i = 0; i < 20; ++i) v = power_step(diag_map({1.0, 3.0}), v, 0.0, rng);
  CHECK(std::abs(v[0]) < 1e-4);
  CHECK(std::abs(v[1] - 1.0) < 1e-4);

  const Vec u = rng.unit_sphere(4);
  const Vec same = power_step([](const Vec& x) { return x; }, u, 0.0, rng);
  for (int i = 0; i < 4; ++i) CHECK(same[i] == doctest::Approx(u[i]));
}

TEST_CASE("power_step contracts the angle at the spectral-gap rate") {
  RngStream rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 3 + static_cast<int>(rng.uniform() * 4);
    Vec lambda(d);
    lambda[0] = 2.0 + rng.uniform() * 3.0;
    for (int i = 1; i < d; ++i) lambda[i] = 0.1 + rng.uniform() * (lambda[0] * 0.8);
    std::sort(lambda.begin() + 1, lambda.end(), std::greater<double>());
    const double ratio = lambda[1] / lambda[0];
    auto apply = [&](const Vec& v) {
      Vec out(d);
      for (int i = 0; i < d; ++i) out[i] = lambda[i] * v[i];
      return out;
    };
    Vec v = rng.unit_sphere(d);
    if (std::abs(v[0]) < 0.05) continue;
    for (int it = 0; it < 5; ++it) {
      double rest = 0.0;
      for (int i = 1; i < d; ++i) rest += v[i] * v[i];
      const double tan_before = std::sqrt(rest) / std::abs(v[0]);
      v = power_step(apply, v, 0.0, rng);
      rest = 0.0;
      for (int i = 1; i < d; ++i) rest += v[i] * v[i];
      const double tan_after = std::sqrt(rest) / std::abs(v[0]);
      CHECK(tan_after <= ratio * tan_before + 1e-12);
    }
  }
}

TEST_CASE("power_step zero handling") {
  RngStream rng(3);
  auto zero_map = [](const Vec& v) { return Vec(v.size(), 0.0); };
  CHECK_THROWS_AS(power_step(zero_map, {1.0, 0.0}, 0.0, rng), ZeroVector);
  // nonzero perturbation rescues a vanishing image
  const Vec rescued = power_step(zero_map, {1.0, 0.0}, 0.5, rng);
  CHECK(norm2(rescued) == doctest::Approx(1.0));
}

TEST_CASE("symmetry validation") {
  CHECK_THROWS_AS(SymMatrix::from_entries(2, {1, 0.5, 0.25, 1}), std::invalid_argument);
  CHECK_NOTHROW(SymMatrix::from_entries(2, {1, 0.5, 0.5 + 1e-14, 1}));
}

}  // TEST_SUITE
