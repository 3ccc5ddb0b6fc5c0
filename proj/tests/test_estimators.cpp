#include <doctest.h>

#include <cmath>
#include <set>

#include "gcreg/errors.hpp"
#include "gcreg/estimators.hpp"
#include "gcreg/rng.hpp"

using namespace gcreg;

namespace {

Dataset random_dataset(Rng& rng, int n, int dim,
                       double (*f)(const Vector&) = nullptr) {
  Matrix x(n, dim);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) x(i, j) = rng.uniform(-1, 1);
    y(i) = f ? f(x.row(i).transpose()) : rng.normal();
  }
  return Dataset(std::move(x), std::move(y));
}

void check_structure(const Dataset& data, const GcrFitReport& report) {
  CHECK(report.n_alpha == static_cast<int>(report.pairs.size()));
  CHECK(report.n_alpha <= data.size() / 2);
  std::set<int> used;
  Matrix sum = Matrix::Zero(data.dim(), data.dim());
  for (const auto& [i, j] : report.pairs) {
    CHECK(used.insert(i).second);
    CHECK(used.insert(j).second);
    const Vector diff = data.x().row(i) - data.x().row(j);
    sum += diff * diff.transpose();
  }
  CHECK((report.g_hat * report.n_alpha - sum).cwiseAbs().maxCoeff() <= 1e-10);
}

}  // namespace

TEST_CASE("gcr_connect pairs everything under a constant response") {
  Rng rng(31);
  for (int n : {10, 11}) {
    Matrix x(n, 3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-1, 1);
    }
    const Dataset data(x, Vector::Constant(n, 1.5));
    const GcrFitReport report =
        gcr_connect(data, GcrParams{0.5, 0.7, ScanOrder::kOriginal, 0, {}});
    CHECK(report.n_alpha == n / 2);
    for (int k = 0; k < n / 2; ++k) {
      CHECK(report.pairs[static_cast<size_t>(k)] ==
            std::pair<int, int>{2 * k, 2 * k + 1});
    }
    check_structure(data, report);
  }
}

TEST_CASE("gcr_connect reports NO-PAIRS when alpha is unreachable") {
  Matrix x(4, 1);
  x << 0, 1, 2, 3;
  Vector y(4);
  y << 0, 10, 20, 30;
  const Dataset data(x, y);
  CHECK_THROWS_AS(
      gcr_connect(data, GcrParams{1e-6, 10.0, ScanOrder::kOriginal, 0, {}}),
      NoPairsError);
}

TEST_CASE("gcr_connect structural invariants on random data") {
  Rng rng(404);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset data = random_dataset(rng, 80, 3);
    GcrParams params{0.8, 0.6, ScanOrder::kOriginal, 0, {}};
    const GcrFitReport report = gcr_connect(data, params);
    check_structure(data, report);
  }
}

TEST_CASE("gcr_fit is bit-deterministic with the original scan order") {
  Rng rng(808);
  const Dataset data = random_dataset(rng, 60, 3);
  const GcrParams params{1.0, 0.5, ScanOrder::kOriginal, 0, {}};
  const GcrFitReport a = gcr_fit(data, params, 1);
  const GcrFitReport b = gcr_fit(data, params, 1);
  CHECK(a.pairs == b.pairs);
  CHECK(a.g_hat == b.g_hat);  // bitwise
  CHECK(a.basis->matrix() == b.basis->matrix());
  CHECK(a.eigenvalues.size() == 3);
  for (int k = 1; k < 3; ++k) CHECK(a.eigenvalues(k) >= a.eigenvalues(k - 1));
}

TEST_CASE("gcr shuffled order is seed-deterministic") {
  Rng rng(112);
  const Dataset data = random_dataset(rng, 60, 3);
  GcrParams p1{1.0, 0.5, ScanOrder::kShuffled, 7, {}};
  const GcrFitReport a = gcr_connect(data, p1);
  const GcrFitReport b = gcr_connect(data, p1);
  CHECK(a.pairs == b.pairs);
  GcrParams p2{1.0, 0.5, ScanOrder::kShuffled, 8, {}};
  const GcrFitReport c = gcr_connect(data, p2);
  CHECK(a.pairs != c.pairs);
  check_structure(data, a);
  check_structure(data, c);
}

TEST_CASE("gcr candidate_cap limits the inner scan") {
  Matrix x(4, 1);
  x << 0.0, 3.0, 0.05, 3.05;
  Vector y(4);
  y << 0.0, 7.0, 0.02, 7.02;
  const Dataset data(x, y);
  // Uncapped: each leader skips the far candidate and connects to its
  // close neighbor. Capped at one evaluation per leader, every leader
  // burns its only try on a far candidate, so nothing connects.
  GcrParams uncapped{0.01, 0.1, ScanOrder::kOriginal, 0, {}};
  const GcrFitReport full = gcr_connect(data, uncapped);
  REQUIRE(full.n_alpha == 2);
  CHECK(full.pairs[0] == std::pair<int, int>{0, 2});
  CHECK(full.pairs[1] == std::pair<int, int>{1, 3});
  GcrParams capped{0.01, 0.1, ScanOrder::kOriginal, 0, 1};
  CHECK_THROWS_AS(gcr_connect(data, capped), NoPairsError);
}

TEST_CASE("scr hand-built rank-one example") {
  Matrix x(3, 2);
  x << 0, 0, 0.01, 5, 1, 0;
  Vector y(3);
  y << 0, 0.01, 1;
  const Dataset data(x, y);
  const auto pairs = scr_pairs(data, 0.05);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<int, int>{0, 1});
  const Basis basis = scr_fit(data, 0.05, 1);
  Vector expected(2);
  expected << 5.0, -0.01;
  expected.normalize();
  CHECK(std::abs(basis.matrix().col(0).dot(expected)) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scr uses every pair under a constant response") {
  Rng rng(66);
  const int n = 24;
  Matrix x(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-1, 1);
  }
  const Dataset data(x, Vector::Constant(n, -2.0));
  const auto pairs = scr_pairs(data, 0.5);
  CHECK(static_cast<int>(pairs.size()) == n * (n - 1) / 2);

  // Mean pairwise scatter, brute force.
  Matrix scatter = Matrix::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vector diff = x.row(i) - x.row(j);
      scatter += diff * diff.transpose();
    }
  }
  scatter /= static_cast<double>(n * (n - 1) / 2);
  Matrix k_hat = Matrix::Zero(3, 3);
  for (const auto& [i, j] : pairs) {
    const Vector diff = x.row(i) - x.row(j);
    k_hat += diff * diff.transpose();
  }
  k_hat /= static_cast<double>(pairs.size());
  CHECK((k_hat - scatter).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scr reports NO-PAIRS for an unreachable alpha") {
  Matrix x(3, 2);
  x << 0, 0, 1, 0, 0, 1;
  Vector y(3);
  y << 0, 10, 20;
  CHECK_THROWS_AS(scr_fit(Dataset(x, y), 0.5, 1), NoPairsError);
}

TEST_CASE("sir recovers a monotone single index") {
  Rng rng(2718);
  const int n = 2000, D = 6;
  Matrix x(n, D);
  Vector y(n);
  Vector direction = Vector::Zero(D);
  direction(0) = 0.6;
  direction(1) = 0.8;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < D; ++j) x(i, j) = rng.normal();
    y(i) = std::atan(x.row(i) * direction);  // strictly increasing link
  }
  const Dataset data(x, y);
  const Basis basis = sir_fit(data, 1, 200);
  Matrix target(D, 1);
  target.col(0) = direction;
  CHECK(projection_distance(basis, Basis::from_orthonormal(target)) < 0.1);
}

TEST_CASE("sir fails on a symmetric link") {
  Rng rng(3141);
  double total = 0.0;
  const int trials = 5;
  for (int t = 0; t < trials; ++t) {
    const int n = 2000, D = 4;
    Matrix x(n, D);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < D; ++j) x(i, j) = rng.uniform(-1, 1);
      y(i) = x(i, 0) * x(i, 0);
    }
    const Basis basis = sir_fit(Dataset(x, y), 1, 200);
    Matrix e1 = Matrix::Zero(D, 1);
    e1(0, 0) = 1.0;
    total += projection_distance(basis, Basis::from_orthonormal(e1));
  }
  CHECK(total / trials >= 0.5);
}

TEST_CASE("sir rejects a constant response") {
  Matrix x(10, 2);
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
  }
  CHECK_THROWS_AS(sir_fit(Dataset(x, Vector::Zero(10)), 1, 2),
                  DegenerateError);
}

TEST_CASE("estimators are rotation-equivariant") {
  Rng rng(13579);
  const int n = 220, D = 4;
  Matrix x(n, D);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < D; ++j) x(i, j) = rng.uniform(-1, 1);
    y(i) = x(i, 0) + 0.5 * x(i, 1) * x(i, 1) + 0.01 * rng.normal();
  }
  // Fixed rotation.
  Matrix raw(D, D);
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) raw(i, j) = rng.normal();
  }
  const Basis rot = orthonormalize(raw);
  const Matrix xr = x * rot.matrix().transpose();  // rows become R x_i
  const Dataset data(x, y), rotated(xr, y);

  auto lift = [&](const Basis& b) {
    return Basis::from_orthonormal(rot.matrix() * b.matrix());
  };

  const GcrParams params{0.05, 0.4, ScanOrder::kOriginal, 0, {}};
  const GcrFitReport g0 = gcr_fit(data, params, 2);
  const GcrFitReport g1 = gcr_fit(rotated, params, 2);
  CHECK(g0.pairs == g1.pairs);  // connection decisions are metric-only
  CHECK(projection_distance(lift(*g0.basis), *g1.basis) <= 1e-6);

  const Basis s0 = scr_fit(data, 0.02, 2);
  const Basis s1 = scr_fit(rotated, 0.02, 2);
  CHECK(projection_distance(lift(s0), s1) <= 1e-6);

  const Basis i0 = sir_fit(data, 2, 40);
  const Basis i1 = sir_fit(rotated, 2, 40);
  CHECK(projection_distance(lift(i0), i1) <= 1e-6);
}

TEST_CASE("estimators ignore a response shift") {
  Rng rng(24680);
  const int n = 200, D = 3;
  Matrix x(n, D);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < D; ++j) x(i, j) = rng.uniform(-1, 1);
    y(i) = std::sin(2.0 * x(i, 0)) + 0.02 * rng.normal();
  }
  const Dataset data(x, y), shifted(x, y.array() + 11.5);

  const GcrParams params{0.05, 0.4, ScanOrder::kOriginal, 0, {}};
  const GcrFitReport g0 = gcr_fit(data, params, 1);
  const GcrFitReport g1 = gcr_fit(shifted, params, 1);
  CHECK(projection_distance(*g0.basis, *g1.basis) <= 1e-9);

  CHECK(projection_distance(scr_fit(data, 0.05, 1),
                            scr_fit(shifted, 0.05, 1)) <= 1e-9);
  CHECK(projection_distance(sir_fit(data, 1, 40),
                            sir_fit(shifted, 1, 40)) <= 1e-9);
}
