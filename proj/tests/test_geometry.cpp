#include "oracles.hpp"
#include "polywalk/errors.hpp"
#include "polywalk/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace polywalk;

namespace {

double deg(double a) { return a * std::numbers::pi / 180.0; }

Polytope random_polytope(Index d, std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  const Index m = d + 3 + static_cast<Index>(gen() % 6);
  Matrix A(m, d);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < d; ++j) A(i, j) = z(gen);
  // Origin strictly inside; the box keeps it bounded.
  Matrix full(m + 2 * d, d);
  full << A, Matrix::Identity(d, d), -Matrix::Identity(d, d);
  Vector b(m + 2 * d);
  for (Index i = 0; i < m; ++i) b[i] = 0.2 + std::abs(z(gen));
  b.tail(2 * d).setConstant(3.0);
  return Polytope(full, b);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("contains on the unit box") {
    const Polytope box = make_box(2);
    CHECK(box.contains(Vector::Constant(2, 0.5), 0.0));
    CHECK(box.contains((Vector(2) << 1.0, 0.5).finished(), 0.0));
    CHECK_FALSE(box.contains((Vector(2) << 1.1, 0.5).finished(), 0.0));
    CHECK_THROWS_AS(box.contains(Vector::Zero(3)), DimensionError);
  }

  TEST_CASE("monotone tolerance") {
    const Polytope box = make_box(2);
    const Vector x = (Vector(2) << 1.0 + 1e-7, 0.5).finished();
    CHECK_FALSE(box.contains(x, 1e-8));
    CHECK(box.contains(x, 1e-6));
    CHECK(box.contains(x, 1e-3));
  }

  TEST_CASE("construction rejects malformed input") {
    CHECK_THROWS_AS(Polytope(Matrix::Zero(1, 2), Vector::Ones(1)), std::invalid_argument);
    CHECK_THROWS_AS(Polytope(Matrix::Identity(2, 2), Vector::Ones(3)), DimensionError);
    Matrix A = Matrix::Identity(2, 2);
    A(0, 1) = std::nan("");
    CHECK_THROWS_AS(Polytope(A, Vector::Ones(2)), std::invalid_argument);
    CHECK_THROWS_AS(Polytope(Matrix(0, 2), Vector(0)), std::invalid_argument);
  }

  TEST_CASE("max_forward_step closed forms") {
    const Polytope box = make_box(2);
    CHECK(box.max_forward_step(Vector::Constant(2, 0.5), Vector::Unit(2, 0)) == doctest::Approx(0.5));
    const Polytope half((Matrix(1, 2) << 1.0, 0.0).finished(), Vector::Ones(1));
    CHECK(std::isinf(half.max_forward_step(Vector::Constant(2, 0.5), -Vector::Unit(2, 0))));
    CHECK_THROWS_AS(box.max_forward_step(Vector::Constant(2, 0.5), Vector::Zero(2)), std::invalid_argument);
    CHECK_THROWS_AS(box.max_forward_step(Vector::Constant(2, 1.5), Vector::Unit(2, 0)), DomainError);
  }

  TEST_CASE("max_forward_step agrees with a bisection line search") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 200; ++trial) {
      const Index d = 2 + trial % 5;
      const Polytope P = random_polytope(d, gen);
      Vector x;
      do {
        x = Vector::NullaryExpr(d, [&] { return 0.05 * z(gen); });
      } while (!P.contains(x, 0.0));
      const Vector v = Vector::NullaryExpr(d, [&] { return z(gen); });
      const double s = P.max_forward_step(x, v);
      REQUIRE(std::isfinite(s));
      CHECK(P.contains(x + s * (1.0 - 1e-12) * v, 1e-12));
      CHECK_FALSE(P.contains(x + s * (1.0 + 1e-6) * v, 0.0));
      const double line = oracle::boundary_distance(P, x, v, 100.0);
      CHECK(std::abs(line - s) <= 1e-10 * std::max(1.0, s));
      // Dense sampling of the open chord.
      for (int k = 0; k < 50; ++k) CHECK(P.contains(x + (s * k / 50.0) * v, 1e-12));
    }
  }

  TEST_CASE("cone at 90 degrees is the unit simplex") {
    const Polytope cone = make_cone(2, 90.0);
    const Polytope expected((Matrix(3, 2) << -1, 0, 0, -1, 1, 1).finished(), (Vector(3) << 0, 0, 1).finished());
    CHECK(same_constraints(cone, expected));
    for (Index d = 2; d <= 8; ++d) CHECK(same_constraints(make_cone(d, 90.0), make_simplex(d)));
  }

  TEST_CASE("diamond at 90 degrees is the unit box") {
    for (Index d = 2; d <= 8; ++d) CHECK(same_constraints(make_diamond(d, 90.0), make_box(d)));
  }

  TEST_CASE("cone at 45 degrees: extreme ray meets the cap at coordinate 1") {
    const double tp = deg(formula_angle_deg(45.0));
    CHECK(formula_angle_deg(45.0) == doctest::Approx(67.5));
    const Polytope cone = make_cone(2, 45.0);
    // Boundary line x2 = tan(θ')·x1 intersected with the cap x1 + x2 = cot(θ') + 1.
    Matrix M(2, 2);
    M << -std::sin(tp), std::cos(tp), 1.0, 1.0;
    const Vector rhs = (Vector(2) << 0.0, 1.0 / std::tan(tp) + 1.0).finished();
    const Vector corner = M.fullPivLu().solve(rhs);
    CHECK(cone.contains(corner, 1e-12));
    CHECK(corner.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cone.slacks(corner).minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("diamond at 45 degrees: corner near (0.293, 0.707)") {
    const double tp = deg(formula_angle_deg(45.0));
    const Polytope diamond = make_diamond(2, 45.0);
    Matrix M(2, 2);
    M << -std::sin(tp), std::cos(tp), -std::cos(tp), std::sin(tp);
    const Vector rhs = (Vector(2) << 0.0, std::sin(tp) - std::cos(tp)).finished();
    const Vector corner = M.fullPivLu().solve(rhs);
    CHECK(corner[0] == doctest::Approx(0.293).epsilon(1e-3));
    CHECK(corner[1] == doctest::Approx(0.707).epsilon(1e-3));
    CHECK(diamond.contains(corner, 1e-12));
  }

  TEST_CASE("built-in shapes: vertices, diagonal points and containment in the unit cube") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (double theta : {9.0, 19.0, 45.0, 90.0}) {
      const double tp = deg(formula_angle_deg(theta));
      for (Index d : {2, 3, 4, 8}) {
        const Polytope cone = make_cone(d, theta);
        const Polytope diamond = make_diamond(d, theta);
        const double t_star = (theta == 90.0 ? 1.0 : 1.0 / std::tan(tp) + 1.0) / static_cast<double>(d);
        CHECK(cone.contains(Vector::Zero(d), 1e-12));
        CHECK(cone.contains(Vector::Constant(d, t_star), 1e-12));
        CHECK(diagonal_exit(cone) == doctest::Approx(t_star).epsilon(1e-12));
        CHECK(diamond.contains(Vector::Zero(d), 1e-12));
        CHECK(diamond.contains(Vector::Ones(d), 1e-12));
        CHECK(diagonal_exit(diamond) == doctest::Approx(1.0).epsilon(1e-12));
        if (theta < 90.0) {
          // Each family of tilted faces is tight at one end of the diagonal.
          const Vector s0 = diamond.slacks(Vector::Zero(d));
          const Vector s1 = diamond.slacks(Vector::Ones(d));
          CHECK(s0.cwiseAbs().minCoeff() <= 1e-12);
          CHECK(s1.cwiseAbs().minCoeff() <= 1e-12);
          CHECK(s0.cwiseMin(s1).cwiseAbs().maxCoeff() <= 1e-12);
        }
        // Interior is nonempty around the diagonal midpoint.
        CHECK(cone.slacks(Vector::Constant(d, 0.5 * t_star)).minCoeff() > 0.0);
        CHECK(diamond.slacks(Vector::Constant(d, 0.5)).minCoeff() > 0.0);
        for (int k = 0; k < 10000 / 16; ++k) {
          const Vector x = Vector::NullaryExpr(d, [&] { return u(gen); });
          if (cone.contains(x, 0.0) || diamond.contains(x, 0.0)) {
            CHECK(x.minCoeff() >= -1e-12);
            CHECK(x.maxCoeff() <= 1.0 + 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("cone diagonal exit at d=4, 45 degrees matches the formula and a line search") {
    const Polytope cone = make_cone(4, 45.0);
    const double expected = (1.0 / std::tan(deg(67.5)) + 1.0) / 4.0;
    CHECK(diagonal_exit(cone) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(oracle::boundary_distance(cone, Vector::Zero(4), Vector::Ones(4), 10.0) ==
          doctest::Approx(expected).epsilon(1e-10));
    CHECK(diagonal_exit(make_cone(2, 90.0)) == doctest::Approx(0.5));
  }

  TEST_CASE("angle range is enforced") {
    CHECK_THROWS_AS(make_cone(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_cone(2, 91.0), std::invalid_argument);
    CHECK_THROWS_AS(make_diamond(2, -5.0), std::invalid_argument);
  }
}
