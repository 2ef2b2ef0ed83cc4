#include "polywalk/metrics.hpp"

#include "polywalk/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace polywalk {

namespace {

bool squared_kind(MetricKind kind) {
  return kind == MetricKind::squared_hessian || kind == MetricKind::scaled_squared_hessian;
}

Matrix signed_sqrt(const Matrix& M) {
  return M.unaryExpr([](double m) { return m < 0.0 ? -std::sqrt(-m) : std::sqrt(m); });
}

}  // namespace

MetricTensor::MetricTensor(MetricKind kind, RawMetric raw, double delta)
    : kind_(kind), raw_(std::move(raw)), delta_(delta) {
  if (!(delta_ >= 0.0) || !std::isfinite(delta_)) throw std::invalid_argument("metric shift must be finite and >= 0");
  if (squared_kind(kind_)) delta_ = std::max(delta_, kMinDelta);
}

Matrix MetricTensor::metric_at(const Vector& x) const {
  Matrix G = raw_(x);
  G.diagonal().array() += delta_;
  return G;
}

MetricTensor MetricTensor::with_delta(double delta) const { return MetricTensor(kind_, raw_, delta); }

MetricTensor make_hessian_metric(TargetPtr target, double delta) {
  return MetricTensor(
      MetricKind::hessian, [t = std::move(target)](const Vector& x) { return Matrix(-t->hessian_log_density(x)); },
      delta);
}

MetricTensor make_squared_hessian_metric(TargetPtr target, double delta) {
  return MetricTensor(
      MetricKind::squared_hessian,
      [t = std::move(target)](const Vector& x) {
        const Matrix H = t->hessian_log_density(x);
        return Matrix(H.transpose() * H);
      },
      delta);
}

MetricTensor make_scaled_squared_hessian_metric(TargetPtr target, double delta) {
  return MetricTensor(
      MetricKind::scaled_squared_hessian,
      [t = std::move(target)](const Vector& x) {
        const Matrix H = t->hessian_log_density(x);
        return signed_sqrt(H.transpose() * H);
      },
      delta);
}

MetricTensor make_barrier_metric(std::shared_ptr<const Polytope> polytope, double delta) {
  return MetricTensor(
      MetricKind::barrier, [P = std::move(polytope)](const Vector& x) { return barrier_hessian(*P, x); }, delta);
}

MetricTensor make_constant_metric(Matrix G, double delta) {
  if (G.rows() != G.cols()) throw DimensionError("constant metric must be square");
  return MetricTensor(
      MetricKind::constant, [G = std::move(G)](const Vector&) { return G; }, delta);
}

MetricTensor make_identity_metric(Index d) { return make_constant_metric(Matrix::Identity(d, d)); }

MetricTensor make_metric(const std::string& name, TargetPtr target, std::shared_ptr<const Polytope> polytope,
                         double delta) {
  if (name == "hessian") return make_hessian_metric(std::move(target), delta);
  if (name == "sq_hessian" || name == "squared") return make_squared_hessian_metric(std::move(target), delta);
  if (name == "sc_sq_hessian" || name == "scaled_squared") return make_scaled_squared_hessian_metric(std::move(target), delta);
  if (name == "barrier") return make_barrier_metric(std::move(polytope), delta);
  if (name == "identity") return make_constant_metric(Matrix::Identity(target->dim(), target->dim()), delta);
  throw std::invalid_argument("unknown metric '" + name + "'");
}

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::hessian: return "hessian";
    case MetricKind::squared_hessian: return "sq_hessian";
    case MetricKind::scaled_squared_hessian: return "sc_sq_hessian";
    case MetricKind::barrier: return "barrier";
    case MetricKind::constant: return "identity";
  }
  return "unknown";
}

Matrix squared_hessian_metric(const Matrix& H, double delta) {
  Matrix G = H.transpose() * H;
  G.diagonal().array() += std::max(delta, kMinDelta);
  return G;
}

Matrix scaled_squared_hessian_metric(const Matrix& H, double delta) {
  Matrix G = signed_sqrt(H.transpose() * H);
  G.diagonal().array() += std::max(delta, kMinDelta);
  return G;
}

Matrix barrier_hessian(const Polytope& P, const Vector& x) {
  const Vector slack = P.slacks(x);
  if ((slack.array() <= 1e-12).any()) throw DomainError("barrier_hessian: point is on or too close to the boundary");
  const Matrix scaled = slack.cwiseInverse().asDiagonal() * P.A();
  Matrix H = scaled.transpose() * scaled;
  if (Eigen::LLT<Matrix>(H).info() != Eigen::Success) {
    throw MetricError("barrier_hessian: constraint matrix does not have full column rank");
  }
  return H;
}

double delta_from_lambda(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  return std::max(1.0 / (lambda * lambda), kMinDelta);
}

FactorizedCovariance::FactorizedCovariance(Matrix metric_cholesky, double eps, bool used_diagonal_fallback)
    : chol_(std::move(metric_cholesky)), eps_(eps), fallback_(used_diagonal_fallback) {
  log_abs_det_ = static_cast<double>(chol_.rows()) * std::log(eps_) - chol_.diagonal().array().log().sum();
}

FactorizedCovariance FactorizedCovariance::isotropic(Index d, double eps) {
  return FactorizedCovariance(Matrix::Identity(d, d), eps, false);
}

Vector FactorizedCovariance::apply(const Vector& u) const {
  return eps_ * chol_.transpose().triangularView<Eigen::Upper>().solve(u);
}

Vector FactorizedCovariance::solve(const Vector& w) const {
  return (chol_.transpose().triangularView<Eigen::Upper>() * w) / eps_;
}

Vector FactorizedCovariance::inverse_metric_times(const Vector& g) const {
  const Vector half = chol_.triangularView<Eigen::Lower>().solve(g);
  return chol_.transpose().triangularView<Eigen::Upper>().solve(half);
}

Matrix FactorizedCovariance::matrix() const {
  return eps_ * chol_.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(dim(), dim()));
}

Matrix FactorizedCovariance::covariance() const {
  const Matrix F = matrix();
  return F * F.transpose();
}

FactorizedCovariance factorize(const Matrix& G, double eps) {
  if (G.rows() != G.cols()) throw DimensionError("factorize: metric must be square");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("factorize: scale must be positive");
  if (!G.allFinite()) throw MetricError("factorize: metric has non-finite entries");
  Eigen::LLT<Matrix> llt(G);
  if (llt.info() == Eigen::Success) {
    Matrix L = llt.matrixL();
    if ((L.diagonal().array() > 0.0).all() && L.allFinite()) return FactorizedCovariance(std::move(L), eps, false);
  }
  const Vector diag = G.diagonal();
  if (!(diag.array() > 0.0).all()) throw MetricError("factorize: diagonal fallback has non-positive entries");
  return FactorizedCovariance(Matrix(diag.cwiseSqrt().asDiagonal()), eps, true);
}

FactorizedCovariance factorize_covariance(const Matrix& Sigma) {
  if (Sigma.rows() != Sigma.cols()) throw DimensionError("factorize_covariance: matrix must be square");
  Eigen::LLT<Matrix> llt(Sigma);
  if (llt.info() != Eigen::Success) throw MetricError("factorize_covariance: covariance is not positive definite");
  const Matrix G = llt.solve(Matrix::Identity(Sigma.rows(), Sigma.cols()));
  Eigen::LLT<Matrix> metric((G + G.transpose()) / 2.0);
  if (metric.info() != Eigen::Success) throw MetricError("factorize_covariance: ill-conditioned covariance");
  return FactorizedCovariance(metric.matrixL(), 1.0, false);
}

}  // namespace polywalk
