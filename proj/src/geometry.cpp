#include "polywalk/geometry.hpp"

#include "polywalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace polywalk {

Polytope::Polytope(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() < 1 || A_.cols() < 1) {
    throw DimensionError("polytope needs at least one constraint and one dimension");
  }
  if (A_.rows() != b_.size()) {
    throw DimensionError("polytope: A has " + std::to_string(A_.rows()) + " rows but b has " +
                         std::to_string(b_.size()) + " entries");
  }
  if (!A_.allFinite() || !b_.allFinite()) {
    throw DimensionError("polytope: non-finite entries");
  }
  for (Index i = 0; i < A_.rows(); ++i) {
    if ((A_.row(i).array() == 0.0).all()) {
      throw DimensionError("polytope: row " + std::to_string(i) + " of A is all zero");
    }
  }
}

void Polytope::check_dim(const Vector& x, const char* what) const {
  if (x.size() != dim()) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(x.size()) +
                         ", polytope dimension is " + std::to_string(dim()));
  }
}

Vector Polytope::slacks(const Vector& x) const {
  check_dim(x, "point");
  return b_ - A_ * x;
}

bool Polytope::contains(const Vector& x, double tol) const {
  check_dim(x, "point");
  return ((A_ * x - b_).array() <= tol).all();
}

double Polytope::max_forward_step(const Vector& x, const Vector& v, double tol) const {
  check_dim(x, "point");
  check_dim(v, "direction");
  if ((v.array() == 0.0).all()) {
    throw std::invalid_argument("max_forward_step: zero direction");
  }
  const Vector slack = b_ - A_ * x;
  if ((slack.array() < -tol).any()) {
    throw DomainError("max_forward_step: point violates the constraints beyond tolerance");
  }
  const Vector rate = A_ * v;
  double step = kInfinity;
  for (Index i = 0; i < rate.size(); ++i) {
    if (rate[i] > kParallelGuard) {
      step = std::min(step, std::max(slack[i], 0.0) / rate[i]);
    }
  }
  return step;
}

namespace {

struct TiltTrig {
  double c;
  double s;
};

// 90° is the common case and must produce exact 0/1 so the shapes reduce to simplex/box.
TiltTrig tilt_trig(double theta_open_deg) {
  if (!(theta_open_deg > 0.0 && theta_open_deg <= 90.0)) {
    throw std::invalid_argument("opening angle must lie in (0, 90] degrees, got " +
                                std::to_string(theta_open_deg));
  }
  const double formula = formula_angle_deg(theta_open_deg);
  if (formula == 90.0) return {0.0, 1.0};
  const double rad = formula * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

Polytope from_rows(const std::vector<Vector>& rows, const std::vector<double>& rhs, Index d) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bool duplicate = false;
    for (std::size_t k : keep) {
      if (rows[k] == rows[r] && rhs[k] == rhs[r]) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) keep.push_back(r);
  }
  Matrix A(static_cast<Index>(keep.size()), d);
  Vector b(static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    A.row(static_cast<Index>(k)) = rows[keep[k]].transpose();
    b[static_cast<Index>(k)] = rhs[keep[k]];
  }
  return Polytope(std::move(A), std::move(b));
}

void check_shape_dim(Index d) {
  if (d < 1) throw std::invalid_argument("dimension must be at least 1");
}

}  // namespace

double formula_angle_deg(double theta_open_deg) { return 0.5 * (90.0 + theta_open_deg); }

Polytope make_cone(Index d, double theta_open_deg) {
  check_shape_dim(d);
  const auto [c, s] = tilt_trig(theta_open_deg);
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      Vector a = Vector::Zero(d);
      a[i] = c;
      a[j] = -s;
      rows.push_back(std::move(a));
      rhs.push_back(0.0);
    }
  }
  if (d == 1) {
    rows.push_back(Vector::Constant(1, -1.0));
    rhs.push_back(0.0);
  }
  rows.push_back(Vector::Ones(d));
  rhs.push_back(c / s + 1.0);
  return from_rows(rows, rhs, d);
}

Polytope make_diamond(Index d, double theta_open_deg) {
  check_shape_dim(d);
  if (d == 1) {
    tilt_trig(theta_open_deg);
    return make_box(1);
  }
  const auto [c, s] = tilt_trig(theta_open_deg);
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      Vector a = Vector::Zero(d);
      a[i] = c;
      a[j] = -s;
      rows.push_back(a);
      rhs.push_back(0.0);
      rows.push_back(-a);
      rhs.push_back(s - c);
    }
  }
  return from_rows(rows, rhs, d);
}

Polytope make_simplex(Index d) {
  check_shape_dim(d);
  Matrix A(d + 1, d);
  A.topRows(d) = -Matrix::Identity(d, d);
  A.row(d).setOnes();
  Vector b = Vector::Zero(d + 1);
  b[d] = 1.0;
  return Polytope(std::move(A), std::move(b));
}

Polytope make_box(Index d, double lo, double hi) {
  check_shape_dim(d);
  if (!(lo < hi)) throw std::invalid_argument("make_box: need lo < hi");
  Matrix A(2 * d, d);
  A.topRows(d) = -Matrix::Identity(d, d);
  A.bottomRows(d) = Matrix::Identity(d, d);
  Vector b(2 * d);
  b.head(d).setConstant(-lo);
  b.tail(d).setConstant(hi);
  return Polytope(std::move(A), std::move(b));
}

double diagonal_exit(const Polytope& P) {
  return P.max_forward_step(Vector::Zero(P.dim()), Vector::Ones(P.dim()));
}

bool same_constraints(const Polytope& lhs, const Polytope& rhs, double tol) {
  if (lhs.dim() != rhs.dim() || lhs.num_constraints() != rhs.num_constraints()) return false;
  std::vector<bool> used(static_cast<std::size_t>(rhs.num_constraints()), false);
  for (Index i = 0; i < lhs.num_constraints(); ++i) {
    bool found = false;
    for (Index k = 0; k < rhs.num_constraints(); ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double row_gap = (lhs.A().row(i) - rhs.A().row(k)).cwiseAbs().maxCoeff();
      if (row_gap <= tol && std::abs(lhs.b()[i] - rhs.b()[k]) <= tol) {
        used[static_cast<std::size_t>(k)] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace polywalk
