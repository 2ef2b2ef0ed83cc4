#include "polywalk/steps.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polywalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Chi final : public StepDistribution {
 public:
  explicit Chi(int d)
      : half_dof_(0.5 * d),
        log_norm_((half_dof_ - 1.0) * std::numbers::ln2 + std::lgamma(half_dof_)),
        dof_(d) {}

  double log_pdf(double s) const override {
    if (s < 0.0 || std::isinf(s)) return -kInf;
    if (s == 0.0) return dof_ == 1 ? -log_norm_ : -kInf;
    return (dof_ - 1) * std::log(s) - 0.5 * s * s - log_norm_;
  }

  double cdf(double s) const override {
    if (s <= 0.0) return 0.0;
    if (std::isinf(s)) return 1.0;
    return boost::math::gamma_p(half_dof_, 0.5 * s * s);
  }

  // Safeguarded Newton on the cdf inside an expanding bracket.
  double inverse_cdf(double u) const override {
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("chi inverse_cdf: probability outside [0, 1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return kInf;
    double lo = 0.0;
    double hi = std::sqrt(static_cast<double>(dof_)) + 1.0;
    while (cdf(hi) < u) {
      lo = hi;
      hi *= 2.0;
    }
    double s = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
      const double f = cdf(s) - u;
      if (f == 0.0) return s;
      if (f > 0.0) {
        hi = s;
      } else {
        lo = s;
      }
      const double density = pdf(s);
      double next = density > 0.0 ? s - f / density : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-12 * std::max(s, 1e-300) || hi - lo <= 1e-15 * hi) return next;
      s = next;
    }
    return s;
  }

  std::string name() const override { return "chi(" + std::to_string(dof_) + ")"; }

 private:
  double half_dof_;
  double log_norm_;
  int dof_;
};

class HalfNormal final : public StepDistribution {
 public:
  explicit HalfNormal(double scale)
      : scale_(scale), log_norm_(0.5 * std::log(2.0 / std::numbers::pi) - std::log(scale)) {}

  double log_pdf(double s) const override {
    if (s < 0.0 || std::isinf(s)) return -kInf;
    const double z = s / scale_;
    return log_norm_ - 0.5 * z * z;
  }
  double cdf(double s) const override {
    if (s <= 0.0) return 0.0;
    return std::erf(s / (scale_ * std::numbers::sqrt2));
  }
  double inverse_cdf(double u) const override {
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("half-normal inverse_cdf: probability outside [0, 1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return kInf;
    return scale_ * std::numbers::sqrt2 * boost::math::erf_inv(u);
  }
  std::string name() const override { return "half_normal(" + std::to_string(scale_) + ")"; }

 private:
  double scale_;
  double log_norm_;
};

void require_dof(int d) {
  if (d < 1) throw std::invalid_argument("step distribution needs d >= 1");
}

}  // namespace

double StepDistribution::pdf(double s) const { return std::exp(log_pdf(s)); }

StepPtr make_chi(int d) {
  require_dof(d);
  return std::make_shared<Chi>(d);
}

StepPtr make_half_normal(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("half-normal scale must be positive");
  return std::make_shared<HalfNormal>(scale);
}

double matched_half_normal_scale(int d, MomentMatch match) {
  require_dof(d);
  if (match == MomentMatch::second) return std::sqrt(static_cast<double>(d));
  // E[χ_d] = √2·Γ((d+1)/2)/Γ(d/2) and E|N(0, σ²)| = σ·√(2/π).
  const double log_ratio = std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d);
  return std::sqrt(std::numbers::pi) * std::exp(log_ratio);
}

StepPtr make_half_normal_matched(int d, MomentMatch match) {
  return make_half_normal(matched_half_normal_scale(d, match));
}

double truncated_log_pdf(const StepDistribution& p, double s, double smax) {
  if (s < 0.0 || s > smax) return -kInf;
  const double mass = std::isinf(smax) ? 1.0 : p.cdf(smax);
  return p.log_pdf(s) - std::log(mass);
}

double sample_truncated(const StepDistribution& p, double smax, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("sample_truncated: u must lie in (0, 1)");
  if (!(smax > 0.0)) throw std::invalid_argument("sample_truncated: smax must be positive");
  if (std::isinf(smax)) return p.inverse_cdf(u);
  const double s = p.inverse_cdf(u * p.cdf(smax));
  return std::min(s, smax);
}

}  // namespace polywalk
