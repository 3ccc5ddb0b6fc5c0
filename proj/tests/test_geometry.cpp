#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gcreg/errors.hpp"
#include "gcreg/geometry.hpp"
#include "gcreg/rng.hpp"

using namespace gcreg;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Basis random_orthogonal(Rng& rng, int n) {
  return orthonormalize(random_matrix(rng, n, n));
}

}  // namespace

TEST_CASE("point_segment_distance basic cases") {
  const Segment seg{vec2(0, 0), vec2(4, 0)};
  CHECK(point_segment_distance(vec2(2, 1.5), seg) == doctest::Approx(1.5));
  CHECK(point_segment_distance(vec2(-0.5, 0), seg) == doctest::Approx(0.5));
  const Segment degenerate{vec2(1, 1), vec2(1, 1)};
  CHECK(point_segment_distance(vec2(1, 1), degenerate) == 0.0);
  CHECK(point_segment_distance(vec2(4, 5), degenerate) ==
        doctest::Approx(5.0));
}

TEST_CASE("tube_contains three-clause truth table") {
  const TubeSpec tube{{vec2(0, 0), vec2(4, 0)}, 1.0};
  CHECK(tube_contains(vec2(2, 0.5), tube));
  CHECK_FALSE(tube_contains(vec2(2, 1.5), tube));   // distance 1.5 > 1
  CHECK_FALSE(tube_contains(vec2(-0.5, 0), tube));  // behind endpoint a
  CHECK_FALSE(tube_contains(vec2(4.5, 0), tube));   // behind endpoint b
  // Boundary: exactly on the cylinder wall and on the end planes.
  CHECK(tube_contains(vec2(2, 1.0), tube));
  CHECK(tube_contains(vec2(0, 0.5), tube));
  CHECK(tube_contains(vec2(4, 0.5), tube));
  // Own endpoints always belong.
  CHECK(tube_contains(tube.segment.a, tube));
  CHECK(tube_contains(tube.segment.b, tube));
}

TEST_CASE("tube_contains degenerate segment is a ball") {
  const TubeSpec ball{{vec2(1, 1), vec2(1, 1)}, 0.5};
  CHECK(tube_contains(vec2(1.2, 1.2), ball));
  CHECK_FALSE(tube_contains(vec2(2, 1), ball));
  CHECK(tube_contains(vec2(1, 1), ball));
}

TEST_CASE("orthonormalize rescales axes") {
  Matrix m(2, 2);
  m << 2, 0, 0, 3;
  const Basis basis = orthonormalize(m);
  CHECK((basis.matrix() - Matrix::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("orthonormalize keeps an orthonormal input") {
  Matrix m(3, 1);
  m << 1, 0, 0;
  const Basis basis = orthonormalize(m);
  CHECK((basis.matrix() - m).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("orthonormalize preserves span") {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  const Basis basis = orthonormalize(m);
  // Span of two independent vectors in R^2 is R^2.
  CHECK((projection_matrix(basis) - Matrix::Identity(2, 2)).norm() < 1e-10);

  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix raw = random_matrix(rng, 6, 3);
    const Basis a = orthonormalize(raw);
    // Projecting the original columns onto the new span must be a no-op.
    CHECK((projection_matrix(a) * raw - raw).norm() < 1e-8 * raw.norm());
  }
}

TEST_CASE("orthonormalize rejects dependent columns") {
  Matrix m(3, 2);
  m << 1, 2, 1, 2, 1, 2;
  CHECK_THROWS_AS(orthonormalize(m), RankDeficiencyError);
}

TEST_CASE("projection_matrix examples") {
  Matrix e1(2, 1);
  e1 << 1, 0;
  Matrix p = projection_matrix(Basis::from_orthonormal(e1));
  Matrix expected(2, 2);
  expected << 1, 0, 0, 0;
  CHECK((p - expected).norm() == doctest::Approx(0.0));

  const Basis full = Basis::identity(3, 3);
  CHECK((projection_matrix(full) - Matrix::Identity(3, 3)).norm() ==
        doctest::Approx(0.0));

  Matrix diag(2, 1);
  diag << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK((projection_matrix(Basis::from_orthonormal(diag)) - half).norm() <
        1e-12);
}

TEST_CASE("projection_distance axis-aligned and rotated") {
  Matrix e1(3, 1), e2(3, 1);
  e1 << 1, 0, 0;
  e2 << 0, 1, 0;
  CHECK(projection_distance(Basis::from_orthonormal(e1),
                            Basis::from_orthonormal(e2)) ==
        doctest::Approx(1.0));

  // 30 degrees in the plane: distance is sin(30 deg) = 0.5; the explicit
  // difference matrix [[0.25, -0.4330...], [-0.4330..., -0.25]] has
  // eigenvalues +-0.5.
  constexpr double kPi = 3.14159265358979323846;
  const double c = std::cos(kPi / 6.0), s = std::sin(kPi / 6.0);
  Matrix rot(2, 1);
  rot << c, s;
  Matrix e1_2d(2, 1);
  e1_2d << 1, 0;
  const Basis a = Basis::from_orthonormal(e1_2d);
  const Basis b = Basis::from_orthonormal(rot);
  const Matrix diff = projection_matrix(a) - projection_matrix(b);
  CHECK(diff(0, 0) == doctest::Approx(1.0 - c * c));
  CHECK(diff(0, 1) == doctest::Approx(-c * s));
  CHECK(projection_distance(a, b) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("projection_distance is basis-rotation invariant") {
  Rng rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    const int D = 6, d = 2;
    const Basis phi = orthonormalize(random_matrix(rng, D, d));
    const Basis q = random_orthogonal(rng, d);
    const Basis rotated = Basis::from_orthonormal(phi.matrix() * q.matrix());
    CHECK(projection_distance(phi, rotated) < 1e-8);

    const Basis other = orthonormalize(random_matrix(rng, D, d));
    const double forward = projection_distance(phi, other);
    CHECK(projection_distance(other, phi) == doctest::Approx(forward));
    CHECK(projection_distance(Basis::from_orthonormal(other.matrix() * q.matrix()), phi) ==
          doctest::Approx(forward).epsilon(1e-9));
    CHECK(forward >= 0.0);
    CHECK(forward <= 1.0 + 1e-12);
  }
}

TEST_CASE("projection_distance agrees with the canonical-angle route") {
  Rng rng(321);
  for (int trial = 0; trial < 25; ++trial) {
    const int D = 7, d = 3;
    const Basis a = orthonormalize(random_matrix(rng, D, d));
    const Basis b = orthonormalize(random_matrix(rng, D, d));
    // sin(theta_1) from the smallest singular value of A^T B.
    Eigen::JacobiSVD<Matrix> svd(a.matrix().transpose() * b.matrix());
    const double cos_min = svd.singularValues().minCoeff();
    const double sin_max = std::sqrt(std::max(0.0, 1.0 - cos_min * cos_min));
    CHECK(projection_distance(a, b) == doctest::Approx(sin_max).epsilon(1e-8));
  }
}

TEST_CASE("projection_distance dimension mismatch") {
  const Basis a = Basis::identity(4, 1);
  const Basis b = Basis::identity(4, 2);
  CHECK_THROWS_AS(projection_distance(a, b), DimensionError);
}

TEST_CASE("smallest_eigvecs diagonal example") {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 0) = 3;
  s(1, 1) = 1;
  s(2, 2) = 2;
  const auto [basis, values] = smallest_eigvecs(s, 1);
  CHECK(values(0) == doctest::Approx(1.0));
  CHECK(std::abs(basis.matrix()(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("smallest_eigvecs fully degenerate") {
  const auto [basis, values] = smallest_eigvecs(Matrix::Zero(4, 4), 2);
  CHECK(values(0) == doctest::Approx(0.0));
  CHECK(values(1) == doctest::Approx(0.0));
  CHECK((basis.matrix().transpose() * basis.matrix() - Matrix::Identity(2, 2))
            .norm() < 1e-10);
}

TEST_CASE("smallest_eigvecs rank-one example") {
  Vector v = vec2(0.01, 5.0);
  const Matrix s = v * v.transpose();
  const auto [basis, values] = smallest_eigvecs(s, 1);
  CHECK(values(0) == doctest::Approx(0.0).epsilon(1e-10));
  Vector expected = vec2(5.0, -0.01).normalized();  // orthogonal to v
  CHECK(std::abs(basis.matrix().col(0).dot(expected)) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(expected(0)) == doctest::Approx(0.999998).epsilon(1e-6));
  CHECK(std::abs(expected(1)) == doctest::Approx(0.0020).epsilon(1e-3));
}

TEST_CASE("smallest_eigvecs rejects bad input") {
  Matrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(smallest_eigvecs(bad, 1), AsymmetryError);
  CHECK_THROWS_AS(smallest_eigvecs(Matrix::Zero(2, 2), 3), DimensionError);
  CHECK_THROWS_AS(smallest_eigvecs(Matrix::Zero(2, 3), 1), DimensionError);
}

TEST_CASE("smallest_eigvecs residuals and orthonormality on random input") {
  Rng rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    const int D = 8;
    Matrix half = random_matrix(rng, D, D);
    Matrix s = 0.5 * (half + half.transpose());
    const int d = 1 + static_cast<int>(rng.below(D));
    const auto [basis, values] = smallest_eigvecs(s, d);
    const double scale = std::max(1.0, s.norm());
    for (int k = 0; k < d; ++k) {
      const Vector v = basis.matrix().col(k);
      CHECK((s * v - values(k) * v).norm() <= 1e-8 * scale);
    }
    CHECK((basis.matrix().transpose() * basis.matrix() -
           Matrix::Identity(d, d))
              .norm() < 1e-10);
    for (int k = 1; k < d; ++k) CHECK(values(k) >= values(k - 1));
  }
}
