// Reference computations used by the tests. None of them call into the code under test
// beyond the function being checked.
#pragma once

#include "polywalk/geometry.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using polywalk::Index;
using polywalk::Matrix;
using polywalk::Vector;

inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Central differences of an analytic gradient, symmetrized.
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& g, const Vector& x, double h) {
  const Index d = x.size();
  Matrix J(d, d);
  for (Index j = 0; j < d; ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (g(xp) - g(xm)) / (2.0 * h);
  }
  return 0.5 * (J + J.transpose());
}

/// Max-norm error relative to max(‖reference‖, 1).
template <typename A, typename B>
double rel_error(const A& value, const B& reference) {
  const double scale = std::max(reference.cwiseAbs().maxCoeff(), 1.0);
  return (value - reference).cwiseAbs().maxCoeff() / scale;
}

/// Largest s with x + s·v inside P, by bisection on membership (upper bound `hi` must be outside).
inline double boundary_distance(const polywalk::Polytope& P, const Vector& x, const Vector& v, double hi,
                                double tol = 0.0) {
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (P.contains(x + mid * v, tol)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                        unsigned depth = 15) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol);
}

/// Density of N(mean, Σ) from the textbook formula with an LU inverse and determinant.
inline double mvn_pdf(const Vector& y, const Vector& mean, const Matrix& Sigma) {
  const Index d = y.size();
  const Eigen::FullPivLU<Matrix> lu(Sigma);
  const Vector r = y - mean;
  const double quad = r.dot(lu.inverse() * r);
  return std::exp(-0.5 * quad) / std::sqrt(std::pow(2.0 * std::numbers::pi, static_cast<double>(d)) * lu.determinant());
}

inline double normal_cdf(double x, double sd = 1.0) { return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2)); }

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    worst = std::max({worst, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  return worst;
}

/// Asymptotic one-sample KS critical value.
inline double ks_critical(double alpha, std::size_t n) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

/// Stationary AR(1) with unit marginal variance.
inline std::vector<double> ar1(double rho, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> xs(n);
  double x = z(gen);
  const double s = std::sqrt(1.0 - rho * rho);
  for (auto& v : xs) {
    x = rho * x + s * z(gen);
    v = x;
  }
  return xs;
}

inline Matrix random_spd(Index d, std::mt19937_64& gen, double floor = 0.5) {
  std::normal_distribution<double> z;
  Matrix B(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) B(i, j) = z(gen);
  return B * B.transpose() + floor * Matrix::Identity(d, d);
}

}  // namespace oracle
