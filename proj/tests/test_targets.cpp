#include "oracles.hpp"
#include "polywalk/errors.hpp"
#include "polywalk/geometry.hpp"
#include "polywalk/targets.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace polywalk;

namespace {

struct Case {
  std::string label;
  TargetPtr target;
  Polytope P;
  Vector center;
  double h;
};

std::vector<Case> derivative_cases() {
  std::vector<Case> cases;
  for (Index d : {2, 5}) {
    cases.push_back({"iso", make_gaussian(GaussianShape::iso, d), make_box(d, -2, 2), Vector::Zero(d), 1e-4});
    cases.push_back({"disc", make_gaussian(GaussianShape::disc, d), make_box(d, -2, 2), Vector::Zero(d), 1e-4});
    cases.push_back({"cigar", make_gaussian(GaussianShape::cigar, d), make_box(d, -2, 2), Vector::Zero(d), 1e-4});
    cases.push_back({"funnel", make_funnel(d), make_box(d, -3, 3), Vector::Zero(d), 1e-4});
    cases.push_back({"bowtie", make_bowtie(d), make_box(d, -3, 3), Vector::Zero(d), 1e-4});
    const Polytope cone = make_cone(d, 19.0);
    const Vector mid = Vector::Constant(d, 0.5 * diagonal_exit(cone));
    for (auto kind : {DensityKind::funnel, DensityKind::bowtie, DensityKind::gauss_iso, DensityKind::gauss_disc,
                      DensityKind::gauss_cigar}) {
      for (double sigma : {0.1, 1.0, 10.0}) {
        for (double mu : {0.0, 0.5}) {
          cases.push_back({to_string(kind) + " placed", place_target(kind, d, sigma, cone, mu), cone, mid,
                           1e-4 * std::min(sigma, 1.0)});
        }
      }
    }
  }
  return cases;
}

/// Uniform point on a random chord through an interior center, kept off the boundary.
Vector random_point(const Polytope& P, const Vector& center, std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(-0.98, 0.98);
  const Vector v = Vector::NullaryExpr(P.dim(), [&] { return z(gen); });
  const double hi = oracle::boundary_distance(P, center, v, 100.0);
  const double lo = oracle::boundary_distance(P, center, -v, 100.0);
  const double t = u(gen);
  return center + (t > 0 ? t * hi : t * lo) * v;
}

}  // namespace

TEST_SUITE("targets") {
  TEST_CASE("Gaussian closed forms") {
    const auto iso = make_gaussian(GaussianShape::iso, 3);
    CHECK(iso->grad_log_density(Vector::Zero(3)).norm() == 0.0);
    CHECK((iso->hessian_log_density(Vector::Zero(3)) + Matrix::Identity(3, 3)).norm() == 0.0);
    const auto disc = make_gaussian(GaussianShape::disc, 2);
    const Vector g = disc->grad_log_density((Vector(2) << 0.1, 0.0).finished());
    CHECK(g[0] == doctest::Approx(-10.0));
    CHECK(g[1] == 0.0);
    const auto cigar = make_gaussian(GaussianShape::cigar, 3);
    CHECK(cigar->hessian_log_density(Vector::Zero(3)).diagonal().isApprox(Vector((Vector(3) << -1, -100, -100).finished())));
    CHECK_THROWS_AS(make_gaussian(GaussianShape::disc, 1), std::invalid_argument);
    CHECK_NOTHROW(make_gaussian(GaussianShape::iso, 1));
  }

  TEST_CASE("funnel closed forms") {
    const auto f = make_funnel(2);
    CHECK(f->grad_log_density(Vector::Zero(2))[1] == 0.0);
    CHECK(f->grad_log_density((Vector(2) << 0.0, 1.0).finished())[1] == doctest::Approx(-1.0));
    // log φ(x) − log φ(0) from the defining expression.
    const Index d = 4;
    const auto f4 = make_funnel(d);
    const Vector x = (Vector(d) << 0.7, -0.3, 0.2, 1.1).finished();
    const double tail = x.tail(d - 1).squaredNorm();
    const double expected = -x[0] * x[0] / 18.0 - 0.5 * (d - 1) * x[0] - 0.5 * std::exp(-x[0]) * tail;
    CHECK(f4->log_density(x) - f4->log_density(Vector::Zero(d)) == doctest::Approx(expected).epsilon(1e-13));
    CHECK_THROWS_AS(make_funnel(1), std::invalid_argument);
  }

  TEST_CASE("bowtie closed forms") {
    const auto b = make_bowtie(2);
    CHECK(b->grad_log_density((Vector(2) << 0.0, 0.1).finished())[1] == doctest::Approx(-1.0));
    CHECK(b->grad_log_density(Vector::Zero(2)).norm() == 0.0);
    const Index d = 3;
    const auto b3 = make_bowtie(d);
    const Vector x = (Vector(d) << -0.8, 0.4, -0.1).finished();
    const double v = x[0] * x[0] / 4.0 + 0.1;
    const double expected = -x[0] * x[0] / 2.0 - 0.5 * (d - 1) * std::log(v) - x.tail(d - 1).squaredNorm() / (2 * v) +
                            0.5 * (d - 1) * std::log(0.1);
    CHECK(b3->log_density(x) - b3->log_density(Vector::Zero(d)) == doctest::Approx(expected).epsilon(1e-13));
    CHECK_THROWS_AS(make_bowtie(1), std::invalid_argument);
  }

  TEST_CASE("derivatives agree with central differences") {
    std::mt19937_64 gen(3);
    for (const auto& c : derivative_cases()) {
      CAPTURE(c.label);
      double worst_g = 0.0, worst_h = 0.0;
      for (int k = 0; k < 100; ++k) {
        const Vector x = random_point(c.P, c.center, gen);
        const auto f = [&](const Vector& z) { return c.target->log_density(z); };
        const auto g = [&](const Vector& z) { return c.target->grad_log_density(z); };
        worst_g = std::max(worst_g, oracle::rel_error(c.target->grad_log_density(x), oracle::fd_gradient(f, x, c.h)));
        worst_h = std::max(worst_h, oracle::rel_error(c.target->hessian_log_density(x), oracle::fd_jacobian(g, x, c.h)));
      }
      CHECK(worst_g <= 1e-5);
      CHECK(worst_h <= 1e-4);
    }
  }

  TEST_CASE("rotation_to_diagonal") {
    CHECK(rotation_to_diagonal(1)(0, 0) == 1.0);
    for (Index d : {2, 3, 8, 32}) {
      const Matrix Q = rotation_to_diagonal(d);
      CHECK((Q.col(0) - Vector::Constant(d, 1.0 / std::sqrt(double(d)))).norm() <= 1e-12);
      CHECK((Q.transpose() * Q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const Matrix Q2 = rotation_to_diagonal(2);
    CHECK(Q2(0, 0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(Q2(1, 0) == doctest::Approx(std::sqrt(0.5)));
  }

  TEST_CASE("transform_target") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> z;
    const auto base = make_funnel(3);
    const auto same = transform_target(base, AffineTransform::identity(3));
    for (int k = 0; k < 100; ++k) {
      const Vector x = Vector::NullaryExpr(3, [&] { return z(gen); });
      CHECK(same->log_density(x) == base->log_density(x));
      CHECK(same->grad_log_density(x) == base->grad_log_density(x));
    }
    AffineTransform t;
    t.location = (Vector(3) << 0.3, -1.0, 2.0).finished();
    t.scale = 0.4;
    t.rotation = rotation_to_diagonal(3);
    const auto moved = transform_target(make_gaussian(GaussianShape::iso, 3), t);
    CHECK(moved->grad_log_density(t.location).norm() <= 1e-12);
    CHECK(moved->log_density(t.location) >= moved->log_density(t.location + 0.01 * Vector::Ones(3)));

    CHECK_THROWS_AS(transform_target(base, AffineTransform::identity(2)), DimensionError);
    AffineTransform bad = AffineTransform::identity(3);
    bad.rotation(0, 1) = 0.1;
    CHECK_THROWS_AS(transform_target(base, bad), std::invalid_argument);
    bad = AffineTransform::identity(3);
    bad.scale = 0.0;
    CHECK_THROWS_AS(transform_target(base, bad), std::invalid_argument);
  }

  TEST_CASE("place_target puts Gaussian modes on the diagonal") {
    const Polytope cone = make_cone(4, 19.0);
    const double t = diagonal_exit(cone);
    for (double mu : {0.0, 0.5}) {
      const auto target = place_target(DensityKind::gauss_disc, 4, 0.1, cone, mu);
      CHECK(target->grad_log_density(Vector::Constant(4, mu * t)).norm() <= 1e-9);
    }
    CHECK(parse_density_kind("gauss_cigar") == DensityKind::gauss_cigar);
    CHECK_THROWS_AS(parse_density_kind("gauss"), std::invalid_argument);
  }
}
