#include <doctest.h>

#include <cmath>
#include <random>

#include "radopt/manifold.hpp"

using namespace radopt;

namespace {

Matrix vec2(double a, double b) {
  Matrix m(2, 1);
  m << a, b;
  return m;
}

// Brute-force tangent projection: build an orthonormal basis of T_X St(p,n)
// from the null space of the linearized constraint X'v + v'X = 0 applied to
// the n*p coordinate basis, then project by summation. Independent of the
// closed-form projection being tested.
Matrix brute_force_stiefel_projection(const Matrix& x, const Matrix& v) {
  const Index n = x.rows(), p = x.cols();
  const Index n_constraints = p * (p + 1) / 2;
  Matrix constraint(n_constraints, n * p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) {
      Matrix basis = Matrix::Zero(n, p);
      basis(i, j) = 1.0;
      const Matrix sym = x.transpose() * basis + basis.transpose() * x;
      Index c = 0;
      for (Index a = 0; a < p; ++a)
        for (Index b = a; b < p; ++b) constraint(c++, j * n + i) = sym(a, b);
    }
  }
  Eigen::FullPivLU<Matrix> lu(constraint);
  const Matrix kernel = lu.kernel();  // columns span the tangent space
  Eigen::HouseholderQR<Matrix> qr(kernel);
  const Matrix basis =
      qr.householderQ() * Matrix::Identity(n * p, kernel.cols());
  const Eigen::Map<const Vector> v_flat(v.data(), n * p);
  Vector projected = Vector::Zero(n * p);
  for (Index c = 0; c < basis.cols(); ++c)
    projected += basis.col(c).dot(v_flat) * basis.col(c);
  return Eigen::Map<const Matrix>(projected.data(), n, p);
}

}  // namespace

TEST_CASE("sphere projection removes the radial component") {
  const auto sphere = Manifold::sphere(2);
  const Matrix x = vec2(1.0, 0.0);
  const Matrix projected = sphere.project(x, vec2(0.5, 2.0));
  CHECK(projected(0) == doctest::Approx(0.0));
  CHECK(projected(1) == doctest::Approx(2.0));
}

TEST_CASE("stiefel projection with p=1 reduces to the sphere case") {
  const auto stiefel = Manifold::stiefel(2, 1);
  const Matrix projected = stiefel.project(vec2(1.0, 0.0), vec2(0.7, -1.3));
  CHECK(projected(0) == doctest::Approx(0.0));
  CHECK(projected(1) == doctest::Approx(-1.3));
}

TEST_CASE("stiefel projection matches the brute-force basis oracle") {
  std::mt19937_64 rng(31);
  const auto stiefel = Manifold::stiefel(3, 2);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix x = stiefel.random_point(rng);
    Matrix v(3, 2);
    for (Index j = 0; j < 2; ++j)
      for (Index i = 0; i < 3; ++i) v(i, j) = gauss(rng);
    const Matrix expected = brute_force_stiefel_projection(x, v);
    CHECK((stiefel.project(x, v) - expected).norm() < 1e-12);
  }
}

TEST_CASE("projection rejects bad inputs") {
  const auto stiefel = Manifold::stiefel(3, 2);
  std::mt19937_64 rng(1);
  const Matrix x = stiefel.random_point(rng);
  CHECK_THROWS_AS(stiefel.project(x, Matrix::Zero(2, 2)), DimensionError);
  CHECK_THROWS_AS(stiefel.project(2.0 * x, Matrix::Zero(3, 2)),
                  FeasibilityError);
}

TEST_CASE("projection is idempotent, symmetric and non-expansive") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  const Manifold manifolds[] = {Manifold::sphere(5), Manifold::stiefel(5, 2),
                                Manifold::grassmann(6, 3)};
  for (const auto& manifold : manifolds) {
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix x = manifold.random_point(rng);
      Matrix u(manifold.rows(), manifold.cols());
      Matrix v(manifold.rows(), manifold.cols());
      for (Index j = 0; j < manifold.cols(); ++j)
        for (Index i = 0; i < manifold.rows(); ++i) {
          u(i, j) = gauss(rng);
          v(i, j) = gauss(rng);
        }
      const Matrix pv = manifold.project(x, v);
      CHECK((manifold.project(x, pv) - pv).norm() < 1e-12);
      CHECK(Manifold::inner(manifold.project(x, u), v) ==
            doctest::Approx(Manifold::inner(u, manifold.project(x, v)))
                .epsilon(1e-12));
      CHECK(pv.norm() <= v.norm() + 1e-15);
    }
  }
}

TEST_CASE("qr retraction of a hand-worked example") {
  const auto stiefel = Manifold::stiefel(2, 1);
  // Gram-Schmidt of (1,1) with the positive-diagonal convention.
  const Matrix next = stiefel.retract(vec2(1.0, 0.0), vec2(0.0, 1.0));
  CHECK(next(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(next(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("polar retraction of a hand-worked example") {
  const auto grassmann = Manifold::grassmann(2, 1);
  // (x + eta)(1 + eta'eta)^{-1/2} at x = e1, eta = (0,1).
  const Matrix next = grassmann.retract(vec2(1.0, 0.0), vec2(0.0, 1.0));
  CHECK(next(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(next(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("retracting a zero tangent returns the point unchanged") {
  std::mt19937_64 rng(11);
  const Manifold manifolds[] = {Manifold::sphere(4), Manifold::stiefel(5, 3),
                                Manifold::grassmann(5, 2)};
  for (const auto& manifold : manifolds) {
    const Matrix x = manifold.random_point(rng);
    const Matrix zero = Matrix::Zero(manifold.rows(), manifold.cols());
    CHECK(manifold.retract(x, zero) == x);
  }
}

TEST_CASE("retraction stays feasible and is first order") {
  std::mt19937_64 rng(23);
  const Manifold manifolds[] = {Manifold::sphere(6), Manifold::stiefel(6, 3),
                                Manifold::grassmann(7, 2)};
  for (const auto& manifold : manifolds) {
    for (int trial = 0; trial < 30; ++trial) {
      const Matrix x = manifold.random_point(rng);
      Matrix eta = manifold.random_tangent(x, rng);
      eta /= eta.norm();
      CHECK(manifold.is_feasible(manifold.retract(x, eta)));
      const double gap_small = manifold.retraction_gap(x, eta, 0.01);
      const double gap_large = manifold.retraction_gap(x, eta, 0.1);
      CHECK(gap_small / gap_large <= 0.02);
    }
  }
}

TEST_CASE("qr factor reports rank deficiency") {
  Matrix a(3, 2);
  a << 1, 2, 2, 4, 3, 6;  // second column is a multiple of the first
  CHECK_THROWS_AS(qr_factor(a), NumericalError);
}

TEST_CASE("check_tangent residuals") {
  const auto sphere = Manifold::sphere(2);
  const Matrix x = vec2(1.0, 0.0);
  SUBCASE("tangent vector passes with zero residual") {
    const auto report = sphere.check_tangent(x, vec2(0.0, 3.0));
    CHECK(report.ok);
    CHECK(report.residual == doctest::Approx(0.0));
  }
  SUBCASE("radial vector fails with unit residual") {
    const auto report = sphere.check_tangent(x, vec2(1.0, 0.0));
    CHECK_FALSE(report.ok);
    CHECK(report.residual == doctest::Approx(1.0));
  }
  SUBCASE("projected vectors are always tangent") {
    std::mt19937_64 rng(3);
    const auto stiefel = Manifold::stiefel(5, 2);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 1000; ++trial) {
      const Matrix base = stiefel.random_point(rng);
      Matrix v(5, 2);
      for (Index j = 0; j < 2; ++j)
        for (Index i = 0; i < 5; ++i) v(i, j) = gauss(rng);
      CHECK(stiefel.check_tangent(base, stiefel.project(base, v)).ok);
    }
  }
}

TEST_CASE("random points are feasible and seed-deterministic") {
  const auto stiefel = Manifold::stiefel(8, 3);
  std::mt19937_64 rng_a(99), rng_b(99);
  const Matrix a = stiefel.random_point(rng_a);
  const Matrix b = stiefel.random_point(rng_b);
  CHECK(a == b);
  CHECK(stiefel.feasibility_residual(a) <= 1e-12);

  const auto sphere = Manifold::sphere(3);
  for (uint64_t seed = 0; seed < 10000; ++seed) {
    std::mt19937_64 rng(seed);
    CHECK(std::abs(sphere.random_point(rng).norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("descriptor contracts") {
  CHECK_THROWS_AS(Manifold::stiefel(2, 5), ContractError);
  CHECK_THROWS_AS(Manifold::sphere(0), ContractError);
  CHECK_THROWS_AS(Manifold::stiefel(5, 2, 0.0), ContractError);
  CHECK_THROWS_AS(Manifold::grassmann(5, 2, 1e-8, -1.0), ContractError);
  const auto manifold = Manifold::stiefel(5, 2, 1e-6, 1e-7);
  CHECK(manifold.tol_feas() == 1e-6);
  CHECK(manifold.tol_tan() == 1e-7);
  CHECK(manifold.ambient_dim() == 10);
}

TEST_CASE("inner product matches an elementwise sum and checks bases") {
  std::mt19937_64 rng(5);
  const auto stiefel = Manifold::stiefel(4, 2);
  const Matrix x = stiefel.random_point(rng);
  const Matrix a = stiefel.random_tangent(x, rng);
  const Matrix b = stiefel.random_tangent(x, rng);

  double by_hand = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) by_hand += a(i, j) * b(i, j);
  CHECK(Manifold::inner(a, b) == doctest::Approx(by_hand).epsilon(1e-14));

  const Matrix zero = Matrix::Zero(4, 2);
  CHECK(Manifold::inner(zero, zero) == 0.0);

  const TangentVector ta = stiefel.tangent(x, a);
  const TangentVector tb = stiefel.tangent(x, b);
  CHECK(stiefel.inner(ta, tb) == Manifold::inner(a, b));

  const Matrix y = stiefel.random_point(rng);
  const TangentVector other = stiefel.tangent(y, stiefel.project(y, b));
  CHECK_THROWS_AS(stiefel.inner(ta, other), ContractError);
}
