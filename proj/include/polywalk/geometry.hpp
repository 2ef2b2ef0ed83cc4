#pragma once

#include <Eigen/Dense>

#include <limits>

namespace polywalk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kDefaultTolerance = 1e-9;
/// |aᵢᵀv| below this counts as a constraint parallel to the ray.
inline constexpr double kParallelGuard = 1e-30;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Convex domain {x : Ax <= b}. Immutable after construction.
class Polytope {
 public:
  /// Throws DimensionError on shape mismatch, empty A, non-finite entries or an all-zero row.
  Polytope(Matrix A, Vector b);

  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  Index dim() const { return A_.cols(); }
  Index num_constraints() const { return A_.rows(); }

  /// b - Ax.
  Vector slacks(const Vector& x) const;

  /// True iff aᵢᵀx <= bᵢ + tol for every row.
  bool contains(const Vector& x, double tol = kDefaultTolerance) const;

  /// Largest s with x + s·v still inside, i.e. the minimum over the rows with aᵢᵀv > 0 of
  /// (bᵢ - aᵢᵀx)/(aᵢᵀv); +infinity when no row lies ahead. A point that is feasible only
  /// within `tol` can yield 0.
  ///
  /// Throws DomainError if x violates a constraint by more than `tol`, std::invalid_argument if v = 0.
  double max_forward_step(const Vector& x, const Vector& v, double tol = kDefaultTolerance) const;

 private:
  void check_dim(const Vector& x, const char* what) const;

  Matrix A_;
  Vector b_;
};

/// Formula angle θ' = (90° + θ_open)/2 used in the tilted-face constraints.
double formula_angle_deg(double theta_open_deg);

/// Simplex with tilted sides: cos θ'·xᵢ − sin θ'·xⱼ <= 0 for all ordered pairs i≠j and
/// Σxᵢ <= cot θ' + 1. Rows that coincide exactly are stored once (at 90° the pairwise rows
/// collapse onto the coordinate half-spaces).
Polytope make_cone(Index d, double theta_open_deg);

/// Unit cube with tilted sides: cos θ'·xᵢ − sin θ'·xⱼ <= 0 and −cos θ'·xᵢ + sin θ'·xⱼ <= sin θ' − cos θ'
/// for all ordered pairs i≠j. Duplicate rows are stored once.
Polytope make_diamond(Index d, double theta_open_deg);

/// {x >= 0, Σx <= 1}.
Polytope make_simplex(Index d);
/// [lo, hi]^d.
Polytope make_box(Index d, double lo = 0.0, double hi = 1.0);

/// Exit distance from the origin along (1,…,1).
double diagonal_exit(const Polytope& P);

/// True when both polytopes hold the same set of rows, in any order.
bool same_constraints(const Polytope& lhs, const Polytope& rhs, double tol = 0.0);

}  // namespace polywalk
