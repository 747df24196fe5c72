#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace sharedeq;
using sharedeq::testing::count_lattice;
using sharedeq::testing::grid_nearest;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}
}  // namespace

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(CappedSimplex(0, 1.0), DomainError);
  CHECK_THROWS_AS(CappedSimplex(2, 0.0), DomainError);
  CHECK_THROWS_AS(CappedSimplex(2, -1.0), DomainError);
}

TEST_CASE("project: documented examples") {
  SUBCASE("symmetric overflow") {
    const CappedSimplex set(2, 3.0);
    const auto p = set.project(vec({2, 2}));
    CHECK(p[0] == doctest::Approx(1.5));
    CHECK(p[1] == doctest::Approx(1.5));
  }
  SUBCASE("already feasible is returned unchanged") {
    const CappedSimplex set(2, 3.0);
    const Vector y = vec({0.5, 0.2});
    CHECK(set.project(y) == y);
  }
  SUBCASE("sorted threshold agrees with the dense-grid oracle") {
    const CappedSimplex set(3, 1.0);
    const Vector y = vec({1, 0.5, -2});
    const Allocation oracle = grid_nearest(set, y, 400);
    CHECK(oracle[0] == doctest::Approx(0.75));
    CHECK(oracle[1] == doctest::Approx(0.25));
    CHECK(oracle[2] == doctest::Approx(0.0));
    const auto p = set.project(y);
    CHECK((p - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("non-finite input") {
    const CappedSimplex set(2, 1.0);
    CHECK_THROWS_AS(set.project(vec({std::nan(""), 0.0})), DomainError);
    CHECK_THROWS_AS(set.project(vec({1.0})), DomainError);
  }
}

TEST_CASE("project: variational characterization and idempotence") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int n = 1; n <= 5; ++n) {
    const CappedSimplex set(n, 1.0 + n * 0.3);
    const auto zs = set.sample(100, 100 + n);
    for (int trial = 0; trial < 20; ++trial) {
      Vector y(n);
      for (int k = 0; k < n; ++k) y[k] = normal(rng);
      const auto p = set.project(y);
      REQUIRE(set.contains(p));
      for (const auto& z : zs) CHECK((y - p).dot(z - p) <= 1e-8);
    }
    for (const auto& x : zs) CHECK(set.project(x) == x);
  }
}

TEST_CASE("maximize_linear") {
  SUBCASE("worst-case VE data: value C(eps+1) at C e_1") {
    const double eps = 0.3, C = 2.0;
    const CappedSimplex set(4, C);
    const auto opt = set.maximize_linear(vec({eps + 1, eps, eps, 2 * eps}));
    CHECK(opt.value == doctest::Approx(C * (eps + 1)));
    CHECK(opt.point == Vector::Unit(4, 0) * C);
  }
  SUBCASE("zero and negative weights give the origin") {
    const CappedSimplex set(2, 5.0);
    CHECK(set.maximize_linear(Vector::Zero(2)).value == 0.0);
    const auto opt = set.maximize_linear(vec({-1, -2}));
    CHECK(opt.value == 0.0);
    CHECK(opt.point == Vector::Zero(2));
  }
  SUBCASE("ties break to the lowest index") {
    const CappedSimplex set(3, 1.0);
    CHECK(set.maximize_linear(vec({0.5, 2, 2})).point == Vector::Unit(3, 1));
  }
  SUBCASE("dominates every grid point") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int n = 1; n <= 3; ++n) {
      const CappedSimplex set(n, 1.5);
      const auto grid = set.grid(50);
      for (int trial = 0; trial < 5; ++trial) {
        Vector w(n);
        for (int k = 0; k < n; ++k) w[k] = normal(rng);
        const double value = set.maximize_linear(w).value;
        for (const auto& z : grid) CHECK(value >= w.dot(z) - 1e-12);
      }
    }
  }
}

TEST_CASE("sample") {
  const CappedSimplex line(1, 1.0);
  for (const auto& x : line.sample(50, 9)) {
    CHECK(x[0] >= 0.0);
    CHECK(x[0] <= 1.0);
  }
  const CappedSimplex set(3, 1.0);
  const auto points = set.sample(1000, 42);
  CHECK(points.size() == 1000);
  for (const auto& x : points) CHECK(set.contains(x));
  const auto again = set.sample(1000, 42);
  for (std::size_t k = 0; k < points.size(); ++k) CHECK(points[k] == again[k]);
  CHECK(set.sample(1, 43).front() != points.front());
}

TEST_CASE("grid") {
  const CappedSimplex line(1, 1.0);
  const auto pts = line.grid(4);
  REQUIRE(pts.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(pts[k][0] == doctest::Approx(0.25 * k));

  CHECK(CappedSimplex(2, 1.0).grid(2).size() == static_cast<std::size_t>(count_lattice(2, 2)));
  CHECK(count_lattice(2, 2) == 6);
  CHECK(CappedSimplex(3, 2.0).grid(10).size() == static_cast<std::size_t>(count_lattice(3, 10)));
  for (const auto& z : CappedSimplex(3, 2.0).grid(10)) CHECK(CappedSimplex(3, 2.0).contains(z));

  CHECK_THROWS_AS(CappedSimplex(6, 1.0).grid(2), DomainError);
  CHECK_THROWS_AS(CappedSimplex(2, 1.0).grid(0), DomainError);
}
