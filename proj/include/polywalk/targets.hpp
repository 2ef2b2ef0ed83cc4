#pragma once

#include "polywalk/geometry.hpp"

#include <memory>
#include <string>

namespace polywalk {

/// Unnormalized log-density log φ with analytic first and second derivatives.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual Index dim() const = 0;
  virtual double log_density(const Vector& x) const = 0;
  virtual Vector grad_log_density(const Vector& x) const = 0;
  virtual Matrix hessian_log_density(const Vector& x) const = 0;
  virtual std::string name() const = 0;
};

using TargetPtr = std::shared_ptr<const TargetDensity>;

enum class GaussianShape { iso, disc, cigar };

/// The benchmark's density families. Gaussians come with a mode placement μ.
enum class DensityKind { funnel, bowtie, gauss_iso, gauss_disc, gauss_cigar };

/// Location-scale-rotation map: φ(x) = φ₀(Qᵀ(x − m)/σ).
struct AffineTransform {
  Vector location;
  double scale = 1.0;
  Matrix rotation;

  static AffineTransform identity(Index d);
  /// Throws std::invalid_argument unless scale > 0, sizes agree and QᵀQ = I within 1e-12.
  void validate() const;
};

/// Zero-centered Gaussian. iso: unit variances; disc: σ₁² = 1/100, others 1;
/// cigar: σ₁² = 1, others 1/100.
TargetPtr make_gaussian(GaussianShape shape, Index d);
/// Zero-centered Gaussian with the given marginal variances.
TargetPtr make_diagonal_gaussian(const Vector& variances);
/// x₁ ~ N(0, 9), xᵢ | x₁ ~ N(0, e^{x₁}).
TargetPtr make_funnel(Index d);
/// x₁ ~ N(0, 1), xᵢ | x₁ ~ N(0, x₁²/4 + 0.1).
TargetPtr make_bowtie(Index d);
/// Constant log-density; restricted to a polytope this is the uniform law.
TargetPtr make_uniform(Index d);

/// Householder reflection Q with Q·e₁ = (1,…,1)/√d. Q is symmetric and orthogonal.
Matrix rotation_to_diagonal(Index d);

TargetPtr transform_target(TargetPtr base, AffineTransform transform);

/// Transformed benchmark target inside a built-in cone or diamond. Gaussians are centered at
/// m = μ·t*·(1,…,1) with t* = diagonal_exit(P); funnel and bowtie always use the halfway point
/// (μ = 0.5). The rotation takes the base density's first axis onto the diagonal.
TargetPtr place_target(DensityKind kind, Index d, double sigma, const Polytope& P, double mu);

bool is_gaussian(DensityKind kind);
std::string to_string(DensityKind kind);
/// Accepts "funnel", "bowtie", "gauss_iso", "gauss_disc", "gauss_cigar".
DensityKind parse_density_kind(const std::string& text);

}  // namespace polywalk
