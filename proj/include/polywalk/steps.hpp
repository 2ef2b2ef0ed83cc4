#pragma once

#include <memory>
#include <string>

namespace polywalk {

/// Distribution of the step magnitude on ℝ⁺.
class StepDistribution {
 public:
  virtual ~StepDistribution() = default;

  virtual double log_pdf(double s) const = 0;
  virtual double cdf(double s) const = 0;
  /// Quantile for u in [0, 1]; inverse_cdf(0) = 0, inverse_cdf(1) = +inf.
  virtual double inverse_cdf(double u) const = 0;
  virtual std::string name() const = 0;

  double pdf(double s) const;
};

using StepPtr = std::shared_ptr<const StepDistribution>;

enum class MomentMatch { second, first };

/// χ distribution with d degrees of freedom (the norm of a d-dimensional standard normal).
StepPtr make_chi(int d);
/// Half-normal |N(0, scale²)|.
StepPtr make_half_normal(double scale);
/// Half-normal whose second moment (default) or mean equals that of χ_d.
StepPtr make_half_normal_matched(int d, MomentMatch match = MomentMatch::second);
/// Scale σ of the half-normal matched to χ_d.
double matched_half_normal_scale(int d, MomentMatch match = MomentMatch::second);

/// log p(s) − log F(smax) on [0, smax], −inf outside. F(+inf) = 1.
double truncated_log_pdf(const StepDistribution& p, double s, double smax);

/// Inverse-transform draw from p truncated to [0, smax]: inverse_cdf(u·F(smax)).
/// Throws std::invalid_argument unless 0 < u < 1 and smax > 0.
double sample_truncated(const StepDistribution& p, double smax, double u);

}  // namespace polywalk
