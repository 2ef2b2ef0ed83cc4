#include "polywalk/targets.hpp"

#include "polywalk/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace polywalk {

namespace {

void check_input(const Vector& x, Index d) {
  if (x.size() != d) {
    throw DimensionError("target of dimension " + std::to_string(d) + " evaluated at a vector of length " +
                         std::to_string(x.size()));
  }
}

class DiagonalGaussian final : public TargetDensity {
 public:
  DiagonalGaussian(Vector variances, std::string name)
      : precision_(variances.cwiseInverse()), name_(std::move(name)) {}

  Index dim() const override { return precision_.size(); }

  double log_density(const Vector& x) const override {
    check_input(x, dim());
    return -0.5 * x.cwiseAbs2().dot(precision_);
  }
  Vector grad_log_density(const Vector& x) const override {
    check_input(x, dim());
    return -precision_.cwiseProduct(x);
  }
  Matrix hessian_log_density(const Vector& x) const override {
    check_input(x, dim());
    return Matrix((-precision_).asDiagonal());
  }
  std::string name() const override { return name_; }

 private:
  Vector precision_;
  std::string name_;
};

// log φ = −x₁²/18 − (d−1)x₁/2 − e^{−x₁}·S/2 with S = Σ_{i≥2} xᵢ².
class Funnel final : public TargetDensity {
 public:
  explicit Funnel(Index d) : d_(d) {}

  Index dim() const override { return d_; }

  double log_density(const Vector& x) const override {
    check_input(x, d_);
    const double x1 = x[0];
    const double tail = x.tail(d_ - 1).squaredNorm();
    return -x1 * x1 / 18.0 - 0.5 * static_cast<double>(d_ - 1) * x1 - 0.5 * std::exp(-x1) * tail;
  }
  Vector grad_log_density(const Vector& x) const override {
    check_input(x, d_);
    const double x1 = x[0];
    const double w = std::exp(-x1);
    Vector g(d_);
    g[0] = -x1 / 9.0 - 0.5 * static_cast<double>(d_ - 1) + 0.5 * w * x.tail(d_ - 1).squaredNorm();
    g.tail(d_ - 1) = -w * x.tail(d_ - 1);
    return g;
  }
  Matrix hessian_log_density(const Vector& x) const override {
    check_input(x, d_);
    const double w = std::exp(-x[0]);
    Matrix H = Matrix::Zero(d_, d_);
    H(0, 0) = -1.0 / 9.0 - 0.5 * w * x.tail(d_ - 1).squaredNorm();
    H.col(0).tail(d_ - 1) = w * x.tail(d_ - 1);
    H.row(0).tail(d_ - 1) = w * x.tail(d_ - 1).transpose();
    H.diagonal().tail(d_ - 1).setConstant(-w);
    return H;
  }
  std::string name() const override { return "funnel"; }

 private:
  Index d_;
};

// Conditional variance v(x₁) = x₁²/4 + 0.1.
// log φ = −x₁²/2 − (d−1)/2·log v − S/(2v) with S = Σ_{i≥2} xᵢ².
class Bowtie final : public TargetDensity {
 public:
  explicit Bowtie(Index d) : d_(d) {}

  Index dim() const override { return d_; }

  double log_density(const Vector& x) const override {
    check_input(x, d_);
    const double x1 = x[0];
    const double v = variance(x1);
    return -0.5 * x1 * x1 - 0.5 * static_cast<double>(d_ - 1) * std::log(v) -
           x.tail(d_ - 1).squaredNorm() / (2.0 * v);
  }
  Vector grad_log_density(const Vector& x) const override {
    check_input(x, d_);
    const double x1 = x[0];
    const double v = variance(x1);
    const double dv = 0.5 * x1;
    const double tail = x.tail(d_ - 1).squaredNorm();
    Vector g(d_);
    g[0] = -x1 - 0.5 * static_cast<double>(d_ - 1) * dv / v + tail * dv / (2.0 * v * v);
    g.tail(d_ - 1) = -x.tail(d_ - 1) / v;
    return g;
  }
  Matrix hessian_log_density(const Vector& x) const override {
    check_input(x, d_);
    const double x1 = x[0];
    const double v = variance(x1);
    const double dv = 0.5 * x1;
    constexpr double ddv = 0.5;
    const double tail = x.tail(d_ - 1).squaredNorm();
    Matrix H = Matrix::Zero(d_, d_);
    H(0, 0) = -1.0 - 0.5 * static_cast<double>(d_ - 1) * (ddv / v - dv * dv / (v * v)) +
              tail * (ddv / (2.0 * v * v) - dv * dv / (v * v * v));
    const Vector cross = x.tail(d_ - 1) * (dv / (v * v));
    H.col(0).tail(d_ - 1) = cross;
    H.row(0).tail(d_ - 1) = cross.transpose();
    H.diagonal().tail(d_ - 1).setConstant(-1.0 / v);
    return H;
  }
  std::string name() const override { return "bowtie"; }

 private:
  static double variance(double x1) { return 0.25 * x1 * x1 + 0.1; }
  Index d_;
};

class Uniform final : public TargetDensity {
 public:
  explicit Uniform(Index d) : d_(d) {}
  Index dim() const override { return d_; }
  double log_density(const Vector& x) const override {
    check_input(x, d_);
    return 0.0;
  }
  Vector grad_log_density(const Vector& x) const override {
    check_input(x, d_);
    return Vector::Zero(d_);
  }
  Matrix hessian_log_density(const Vector& x) const override {
    check_input(x, d_);
    return Matrix::Zero(d_, d_);
  }
  std::string name() const override { return "uniform"; }

 private:
  Index d_;
};

class Transformed final : public TargetDensity {
 public:
  Transformed(TargetPtr base, AffineTransform t) : base_(std::move(base)), t_(std::move(t)) {}

  Index dim() const override { return base_->dim(); }

  double log_density(const Vector& x) const override { return base_->log_density(to_base(x)); }
  Vector grad_log_density(const Vector& x) const override {
    return t_.rotation * base_->grad_log_density(to_base(x)) / t_.scale;
  }
  Matrix hessian_log_density(const Vector& x) const override {
    const Matrix H0 = base_->hessian_log_density(to_base(x));
    return t_.rotation * H0 * t_.rotation.transpose() / (t_.scale * t_.scale);
  }
  std::string name() const override { return base_->name() + "(transformed)"; }

 private:
  Vector to_base(const Vector& x) const {
    check_input(x, dim());
    return t_.rotation.transpose() * (x - t_.location) / t_.scale;
  }

  TargetPtr base_;
  AffineTransform t_;
};

void require_at_least_two(Index d, const char* what) {
  if (d < 2) throw std::invalid_argument(std::string(what) + " needs dimension >= 2");
}

}  // namespace

AffineTransform AffineTransform::identity(Index d) {
  return {Vector::Zero(d), 1.0, Matrix::Identity(d, d)};
}

void AffineTransform::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("transform scale must be positive");
  const Index d = location.size();
  if (rotation.rows() != d || rotation.cols() != d) {
    throw DimensionError("transform rotation must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  const double gap = (rotation.transpose() * rotation - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (gap > 1e-12) throw std::invalid_argument("transform rotation is not orthogonal");
}

TargetPtr make_gaussian(GaussianShape shape, Index d) {
  if (shape == GaussianShape::iso) {
    if (d < 1) throw std::invalid_argument("gaussian needs dimension >= 1");
    return make_diagonal_gaussian(Vector::Ones(d));
  }
  require_at_least_two(d, shape == GaussianShape::disc ? "disc gaussian" : "cigar gaussian");
  Vector variances(d);
  if (shape == GaussianShape::disc) {
    variances.setOnes();
    variances[0] = 1.0 / 100.0;
  } else {
    variances.setConstant(1.0 / 100.0);
    variances[0] = 1.0;
  }
  return std::make_shared<DiagonalGaussian>(variances, shape == GaussianShape::disc ? "gauss_disc" : "gauss_cigar");
}

TargetPtr make_diagonal_gaussian(const Vector& variances) {
  if (variances.size() < 1 || !(variances.array() > 0.0).all()) {
    throw std::invalid_argument("gaussian variances must be positive");
  }
  return std::make_shared<DiagonalGaussian>(variances, "gauss");
}

TargetPtr make_funnel(Index d) {
  require_at_least_two(d, "funnel");
  return std::make_shared<Funnel>(d);
}

TargetPtr make_bowtie(Index d) {
  require_at_least_two(d, "bowtie");
  return std::make_shared<Bowtie>(d);
}

TargetPtr make_uniform(Index d) {
  if (d < 1) throw std::invalid_argument("uniform target needs dimension >= 1");
  return std::make_shared<Uniform>(d);
}

Matrix rotation_to_diagonal(Index d) {
  if (d < 1) throw std::invalid_argument("rotation needs dimension >= 1");
  Matrix Q = Matrix::Identity(d, d);
  if (d == 1) return Q;
  Vector u = -Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  u[0] += 1.0;
  Q.noalias() -= (2.0 / u.squaredNorm()) * u * u.transpose();
  return Q;
}

TargetPtr transform_target(TargetPtr base, AffineTransform transform) {
  if (!base) throw std::invalid_argument("transform_target: null base");
  if (transform.location.size() != base->dim()) {
    throw DimensionError("transform of dimension " + std::to_string(transform.location.size()) +
                         " applied to a target of dimension " + std::to_string(base->dim()));
  }
  transform.validate();
  return std::make_shared<Transformed>(std::move(base), std::move(transform));
}

TargetPtr place_target(DensityKind kind, Index d, double sigma, const Polytope& P, double mu) {
  if (P.dim() != d) throw DimensionError("place_target: polytope dimension mismatch");
  TargetPtr base;
  switch (kind) {
    case DensityKind::funnel:
      base = make_funnel(d);
      mu = 0.5;
      break;
    case DensityKind::bowtie:
      base = make_bowtie(d);
      mu = 0.5;
      break;
    case DensityKind::gauss_iso:
      base = make_gaussian(GaussianShape::iso, d);
      break;
    case DensityKind::gauss_disc:
      base = make_gaussian(GaussianShape::disc, d);
      break;
    case DensityKind::gauss_cigar:
      base = make_gaussian(GaussianShape::cigar, d);
      break;
  }
  const double exit = diagonal_exit(P);
  if (!std::isfinite(exit)) throw DomainError("place_target: polytope is unbounded along the diagonal");
  AffineTransform t{Vector::Constant(d, mu * exit), sigma, rotation_to_diagonal(d)};
  return transform_target(std::move(base), std::move(t));
}

bool is_gaussian(DensityKind kind) {
  return kind == DensityKind::gauss_iso || kind == DensityKind::gauss_disc || kind == DensityKind::gauss_cigar;
}

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::funnel: return "funnel";
    case DensityKind::bowtie: return "bowtie";
    case DensityKind::gauss_iso: return "gauss_iso";
    case DensityKind::gauss_disc: return "gauss_disc";
    case DensityKind::gauss_cigar: return "gauss_cigar";
  }
  return "unknown";
}

DensityKind parse_density_kind(const std::string& text) {
  for (auto kind : {DensityKind::funnel, DensityKind::bowtie, DensityKind::gauss_iso, DensityKind::gauss_disc,
                    DensityKind::gauss_cigar}) {
    if (to_string(kind) == text) return kind;
  }
  throw std::invalid_argument("unknown density kind '" + text + "'");
}

}  // namespace polywalk
