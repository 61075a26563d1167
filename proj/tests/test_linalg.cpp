#include <cmath>

#include "doctest.h"
#include "etdlab/errors.hpp"
#include "etdlab/linalg.hpp"
#include "etdlab/rng.hpp"

using etdlab::Matrix;

TEST_CASE("solve recovers a known solution and reports singular systems") {
  const Matrix a{{4, 1, 0}, {1, 3, 1}, {0, 1, 2}};
  const Matrix x_true{{1}, {-2}, {3}};
  Matrix x;
  REQUIRE(etdlab::solve(a, a * x_true, x));
  for (std::size_t i = 0; i < 3; ++i) CHECK(x(i, 0) == doctest::Approx(x_true(i, 0)).epsilon(1e-14));

  const Matrix singular{{1, 2}, {2, 4}};
  CHECK_FALSE(etdlab::solve(singular, Matrix{{1}, {1}}, x));
}

TEST_CASE("rank detects dependent columns") {
  CHECK(etdlab::rank(Matrix{{3, 1}, {1, 1}}) == 2);
  CHECK(etdlab::rank(Matrix{{1, 2}, {2, 4}, {3, 6}}) == 1);
  CHECK(etdlab::rank(Matrix(3, 2)) == 0);
}

TEST_CASE("Jacobi eigenvalues of a 2x2 symmetric matrix match the closed form") {
  etdlab::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = rng.uniform() * 4 - 2, b = rng.uniform() * 4 - 2, d = rng.uniform() * 4 - 2;
    const auto eig = etdlab::symmetric_eigenvalues(Matrix{{a, b}, {b, d}});
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
    CHECK(eig[0] == doctest::Approx(mid - rad).epsilon(1e-9));
    CHECK(eig[1] == doctest::Approx(mid + rad).epsilon(1e-9));
  }
}

TEST_CASE("Jacobi eigenvalues preserve trace and Frobenius norm") {
  etdlab::Rng rng(5);
  for (std::size_t n = 3; n <= 8; ++n) {
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) s(i, j) = s(j, i) = rng.uniform() * 2 - 1;
    double trace = 0.0, frob = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trace += s(i, i);
      for (std::size_t j = 0; j < n; ++j) frob += s(i, j) * s(i, j);
    }
    const auto eig = etdlab::symmetric_eigenvalues(s);
    double et = 0.0, e2 = 0.0;
    for (double e : eig) {
      et += e;
      e2 += e * e;
    }
    CHECK(et == doctest::Approx(trace).epsilon(1e-10));
    CHECK(e2 == doctest::Approx(frob).epsilon(1e-9));
  }
}

TEST_CASE("characteristic polynomial of small matrices") {
  // det(sI - A) for A = [[a, b], [c, d]] is s^2 - (a + d) s + (ad - bc).
  const auto c2 = etdlab::characteristic_polynomial(Matrix{{1, 2}, {3, 4}});
  REQUIRE(c2.size() == 3);
  CHECK(c2[0] == 1.0);
  CHECK(c2[1] == doctest::Approx(-5.0));
  CHECK(c2[2] == doctest::Approx(-2.0));

  // Upper triangular: roots are the diagonal (1, 2, 3).
  const auto c3 = etdlab::characteristic_polynomial(Matrix{{1, 5, 7}, {0, 2, 9}, {0, 0, 3}});
  CHECK(c3[1] == doctest::Approx(-6.0));
  CHECK(c3[2] == doctest::Approx(11.0));
  CHECK(c3[3] == doctest::Approx(-6.0));
}

TEST_CASE("shape mismatches are contract errors") {
  CHECK_THROWS_AS(Matrix(2, 3) * Matrix(2, 3), etdlab::ContractError);
  CHECK_THROWS_AS((Matrix{{1.0, 2.0}, {3.0}}), etdlab::ContractError);
}

TEST_CASE("rng below stays in range and uniform stays in [0, 1)") {
  etdlab::Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.below(7) < 7);
  }
  etdlab::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}
