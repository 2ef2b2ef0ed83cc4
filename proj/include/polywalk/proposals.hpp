#pragma once

#include "polywalk/geometry.hpp"
#include "polywalk/metrics.hpp"
#include "polywalk/rng.hpp"
#include "polywalk/steps.hpp"
#include "polywalk/targets.hpp"

#include <memory>
#include <optional>
#include <string>

namespace polywalk {

/// Chords shorter than this are treated as degenerate (self-transition).
inline constexpr double kDegenerateChord = 1e-30;

enum class SamplerKind { rwmh, mala, smmala, hr, lhr, smhr, smlhr, dikin, mapla };

/// epsilon: the step parameter is ε (or Dikin's r, MAPLA's h) and the metric keeps its own δ.
/// delta: ε = 1 and the step parameter is λ with δ = λ⁻² (manifold kinds only).
enum class StepParametrization { epsilon, delta };

struct SamplerId {
  SamplerKind kind = SamplerKind::hr;
  StepParametrization parametrization = StepParametrization::epsilon;
};

/// "rwmh" | "mala" | "smmala" | "hr" | "lhr" | "smhr" | "smlhr" | "dikin" | "mapla", with an
/// optional "_eps" / "_delta" suffix on the manifold kinds (default "_eps").
SamplerId parse_sampler(const std::string& text);
std::string to_string(SamplerId id);
std::string to_string(SamplerKind kind);

bool is_hit_and_run(SamplerKind kind);
bool uses_gradient(SamplerKind kind);
bool uses_target_metric(SamplerKind kind);
bool uses_barrier(SamplerKind kind);

struct Proposal {
  Vector y;
  double log_q_forward = 0.0;
  double smax = kInfinity;
  bool degenerate = false;
};

/// Result of clipping a drift direction g at x.
struct ClippedDrift {
  Vector mean;
  double eps_hat = 0.0;
  double kappa = kInfinity;
  bool clipped = false;
};

/// κ = max_forward_step(P, x, g), ε̂ = min(eps2_half, κ/2), mean = x + ε̂·g.
/// A zero g gives mean = x and ε̂ = eps2_half.
ClippedDrift clipped_drift(const Vector& x, const Vector& g, double eps2_half, const Polytope& P);

/// One elliptical Hit-&-Run draw from `center`: u uniform on the sphere, v = F·u,
/// s ~ p truncated to [0, smax], y = center + s·v. Consumes d normals, then one uniform.
Proposal ehr_propose(const Vector& center, const FactorizedCovariance& F, const StepDistribution& p,
                     const Polytope& P, Rng& rng);

/// log q_EHR(y | center): p_[0,smax](γ)/(γ^{d−1}|det F|) · Γ(d/2)/(2π^{d/2}) with γ = ‖F⁻¹(y − center)‖
/// and smax the exit distance along (y − center)/γ. −inf for y = center or y beyond the chord.
double ehr_log_q(const Vector& y, const Vector& center, const FactorizedCovariance& F, const StepDistribution& p,
                 const Polytope& P);

/// log N(y; mean, F·Fᵀ).
double gaussian_log_q(const Vector& y, const Vector& mean, const FactorizedCovariance& F);

struct KernelSpec {
  SamplerKind kind = SamplerKind::hr;
  StepParametrization parametrization = StepParametrization::epsilon;
  /// ε, λ (delta parametrization), Dikin radius r, or MAPLA step h.
  double step = 1.0;
  TargetPtr target;
  std::shared_ptr<const Polytope> polytope;
  /// Required for smmala/smhr/smlhr. Dikin and MAPLA build the barrier metric themselves.
  std::optional<MetricTensor> metric;
  /// Required for the Hit-&-Run kinds.
  StepPtr step_distribution;
};

/// Everything a kernel needs at a conditioning point: the proposal center and covariance factor.
/// Computed once per state and reused for the forward draw and for the reverse density.
struct LocalFrame {
  Vector point;
  Vector center;
  FactorizedCovariance factor;
  double eps_hat = 0.0;
  bool clipped = false;
  bool metric_fallback = false;
  bool isotropic_fallback = false;
};

class ProposalKernel {
 public:
  /// Throws std::invalid_argument when a dependency of the requested kind is missing.
  explicit ProposalKernel(KernelSpec spec);

  SamplerKind kind() const { return spec_.kind; }
  SamplerId id() const { return {spec_.kind, spec_.parametrization}; }
  double step() const { return spec_.step; }
  const Polytope& polytope() const { return *spec_.polytope; }
  const TargetDensity& target() const { return *spec_.target; }
  Index dim() const { return spec_.target->dim(); }

  /// Throws DomainError when the frame cannot be built at x (near-boundary barrier, non-finite
  /// gradient). A metric that cannot be factorized even on its diagonal degrades to ε²I.
  LocalFrame prepare(const Vector& x) const;
  Proposal propose(const LocalFrame& at, Rng& rng) const;
  double log_q(const Vector& y, const LocalFrame& at) const;
  double log_q(const Vector& y, const Vector& x) const { return log_q(y, prepare(x)); }

 private:
  KernelSpec spec_;
  double eps_ = 1.0;
};

std::shared_ptr<const ProposalKernel> make_kernel(KernelSpec spec);

}  // namespace polywalk
