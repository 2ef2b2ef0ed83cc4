#pragma once

#include "polywalk/geometry.hpp"
#include "polywalk/targets.hpp"

#include <functional>
#include <memory>
#include <string>

namespace polywalk {

/// Smallest δ accepted by the squared-Hessian metrics and the λ parametrization.
inline constexpr double kMinDelta = 1e-12;

enum class MetricKind { hessian, squared_hessian, scaled_squared_hessian, barrier, constant };

/// Position-dependent metric G(x) + δI. Value type; the raw part is shared and immutable.
class MetricTensor {
 public:
  using RawMetric = std::function<Matrix(const Vector&)>;

  MetricTensor(MetricKind kind, RawMetric raw, double delta);

  Matrix metric_at(const Vector& x) const;
  MetricKind kind() const { return kind_; }
  double delta() const { return delta_; }
  /// Same metric with another shift (clamped to kMinDelta for the squared kinds).
  MetricTensor with_delta(double delta) const;

 private:
  MetricKind kind_;
  RawMetric raw_;
  double delta_;
};

/// −∇²log φ(x) + δI.
MetricTensor make_hessian_metric(TargetPtr target, double delta = 0.0);
/// HᵀH + δI.
MetricTensor make_squared_hessian_metric(TargetPtr target, double delta);
/// Signed entrywise square root of HᵀH, plus δI.
MetricTensor make_scaled_squared_hessian_metric(TargetPtr target, double delta);
/// Log-barrier Hessian of the polytope, plus δI.
MetricTensor make_barrier_metric(std::shared_ptr<const Polytope> polytope, double delta = 0.0);
MetricTensor make_constant_metric(Matrix G, double delta = 0.0);
MetricTensor make_identity_metric(Index d);

/// Builds a metric from its run-config name:
/// "hessian" | "sq_hessian" | "sc_sq_hessian" | "barrier" | "identity"; "squared" and
/// "scaled_squared" are accepted as aliases.
MetricTensor make_metric(const std::string& name, TargetPtr target, std::shared_ptr<const Polytope> polytope,
                         double delta);
std::string to_string(MetricKind kind);

Matrix squared_hessian_metric(const Matrix& H, double delta);
Matrix scaled_squared_hessian_metric(const Matrix& H, double delta);

/// Σᵢ aᵢaᵢᵀ/(bᵢ − aᵢᵀx)². Throws DomainError when a slack is <= 1e-12 and MetricError when the
/// result is not positive definite (rank-deficient A).
Matrix barrier_hessian(const Polytope& P, const Vector& x);

/// δ = λ⁻², clamped below at kMinDelta.
double delta_from_lambda(double lambda);

/// Square-root factor F of a covariance Σ = F·Fᵀ.
///
/// Stored as F = ε·M⁻ᵀ where M is the lower Cholesky factor of the (possibly diagonalized)
/// metric, so that Σ = ε²·(MMᵀ)⁻¹. F is upper triangular; applying F and F⁻¹ costs one
/// triangular solve or product.
class FactorizedCovariance {
 public:
  FactorizedCovariance() = default;
  FactorizedCovariance(Matrix metric_cholesky, double eps, bool used_diagonal_fallback);

  static FactorizedCovariance isotropic(Index d, double eps);

  Index dim() const { return chol_.rows(); }
  double scale() const { return eps_; }
  double log_abs_det() const { return log_abs_det_; }
  bool used_diagonal_fallback() const { return fallback_; }
  const Matrix& metric_cholesky() const { return chol_; }

  /// F·u.
  Vector apply(const Vector& u) const;
  /// F⁻¹·w.
  Vector solve(const Vector& w) const;
  /// G⁻¹·g for the metric that was factorized.
  Vector inverse_metric_times(const Vector& g) const;
  /// Dense F.
  Matrix matrix() const;
  /// Dense F·Fᵀ.
  Matrix covariance() const;

 private:
  Matrix chol_;
  double eps_ = 1.0;
  double log_abs_det_ = 0.0;
  bool fallback_ = false;
};

/// Factor of ε²·G⁻¹. On Cholesky failure G is replaced by diag(G) and the flag is set;
/// throws MetricError if a diagonal entry is not positive (or G is not finite).
FactorizedCovariance factorize(const Matrix& G, double eps);

/// Factor of an explicit s.p.d. covariance Σ. Throws MetricError if Σ is not s.p.d.
FactorizedCovariance factorize_covariance(const Matrix& Sigma);

}  // namespace polywalk
