#include "polywalk/proposals.hpp"

#include "polywalk/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polywalk {

namespace {

struct KindName {
  SamplerKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {SamplerKind::rwmh, "rwmh"}, {SamplerKind::mala, "mala"},   {SamplerKind::smmala, "smmala"},
    {SamplerKind::hr, "hr"},     {SamplerKind::lhr, "lhr"},     {SamplerKind::smhr, "smhr"},
    {SamplerKind::smlhr, "smlhr"}, {SamplerKind::dikin, "dikin"}, {SamplerKind::mapla, "mapla"},
};

// log Γ(d/2) − log 2 − (d/2) log π: inverse surface area of the unit sphere in ℝᵈ.
double log_sphere_density(Index d) {
  const double half = 0.5 * static_cast<double>(d);
  return std::lgamma(half) - std::numbers::ln2 - half * std::log(std::numbers::pi);
}

double ehr_log_density(double gamma, double smax, const FactorizedCovariance& F, const StepDistribution& p) {
  const double mass = std::isinf(smax) ? 1.0 : p.cdf(smax);
  const Index d = F.dim();
  return p.log_pdf(gamma) - std::log(mass) - static_cast<double>(d - 1) * std::log(gamma) - F.log_abs_det() +
         log_sphere_density(d);
}

// Rounding in y = center + s·v can put the recomputed γ a hair beyond smax.
constexpr double kChordSlack = 1e-9;

}  // namespace

SamplerId parse_sampler(const std::string& text) {
  std::string base = text;
  StepParametrization param = StepParametrization::epsilon;
  bool suffixed = false;
  for (const auto& [suffix, value] : {std::pair<std::string, StepParametrization>{"_eps", StepParametrization::epsilon},
                                      {"_delta", StepParametrization::delta}}) {
    if (base.size() > suffix.size() && base.ends_with(suffix)) {
      base.resize(base.size() - suffix.size());
      param = value;
      suffixed = true;
      break;
    }
  }
  for (const auto& entry : kKindNames) {
    if (base == entry.name) {
      if (suffixed && !uses_target_metric(entry.kind)) {
        throw std::invalid_argument("sampler '" + text + "': only smmala/smhr/smlhr take a parametrization suffix");
      }
      return {entry.kind, param};
    }
  }
  throw std::invalid_argument("unknown sampler '" + text + "'");
}

std::string to_string(SamplerKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

std::string to_string(SamplerId id) {
  std::string name = to_string(id.kind);
  if (uses_target_metric(id.kind)) name += id.parametrization == StepParametrization::delta ? "_delta" : "_eps";
  return name;
}

bool is_hit_and_run(SamplerKind kind) {
  return kind == SamplerKind::hr || kind == SamplerKind::lhr || kind == SamplerKind::smhr || kind == SamplerKind::smlhr;
}

bool uses_gradient(SamplerKind kind) {
  return kind == SamplerKind::mala || kind == SamplerKind::smmala || kind == SamplerKind::lhr ||
         kind == SamplerKind::smlhr || kind == SamplerKind::mapla;
}

bool uses_target_metric(SamplerKind kind) {
  return kind == SamplerKind::smmala || kind == SamplerKind::smhr || kind == SamplerKind::smlhr;
}

bool uses_barrier(SamplerKind kind) { return kind == SamplerKind::dikin || kind == SamplerKind::mapla; }

ClippedDrift clipped_drift(const Vector& x, const Vector& g, double eps2_half, const Polytope& P) {
  if ((g.array() == 0.0).all()) return {x, eps2_half, kInfinity, false};
  const double kappa = P.max_forward_step(x, g);
  ClippedDrift out;
  out.kappa = kappa;
  out.clipped = 0.5 * kappa < eps2_half;
  out.eps_hat = out.clipped ? 0.5 * kappa : eps2_half;
  out.mean = x + out.eps_hat * g;
  return out;
}

Proposal ehr_propose(const Vector& center, const FactorizedCovariance& F, const StepDistribution& p,
                     const Polytope& P, Rng& rng) {
  const Index d = center.size();
  Vector u = rng.normal_vector(d);
  double norm = u.norm();
  while (norm == 0.0) {
    u = rng.normal_vector(d);
    norm = u.norm();
  }
  u /= norm;
  const Vector v = F.apply(u);
  const double smax = P.max_forward_step(center, v);
  const double uniform = rng.uniform();

  Proposal out;
  out.smax = smax;
  if (smax <= kDegenerateChord) {
    out.y = center;
    out.degenerate = true;
    out.log_q_forward = -kInfinity;
    return out;
  }
  const double s = sample_truncated(p, smax, uniform);
  out.y = center + s * v;
  out.log_q_forward = s > 0.0 ? ehr_log_density(s, smax, F, p) : -kInfinity;
  return out;
}

double ehr_log_q(const Vector& y, const Vector& center, const FactorizedCovariance& F, const StepDistribution& p,
                 const Polytope& P) {
  const Vector delta = y - center;
  const double gamma = F.solve(delta).norm();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) return -kInfinity;
  const double smax = P.max_forward_step(center, delta / gamma);
  if (gamma > smax) {
    if (gamma > smax * (1.0 + kChordSlack)) return -kInfinity;
    // On the boundary up to rounding: the density value at smax itself.
    const double mass = p.cdf(smax);
    return p.log_pdf(gamma) - std::log(mass) - static_cast<double>(F.dim() - 1) * std::log(gamma) - F.log_abs_det() +
           log_sphere_density(F.dim());
  }
  return ehr_log_density(gamma, smax, F, p);
}

double gaussian_log_q(const Vector& y, const Vector& mean, const FactorizedCovariance& F) {
  const Vector z = F.solve(y - mean);
  const double d = static_cast<double>(y.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi) - F.log_abs_det() - 0.5 * z.squaredNorm();
}

ProposalKernel::ProposalKernel(KernelSpec spec) : spec_(std::move(spec)) {
  const std::string name = to_string(SamplerId{spec_.kind, spec_.parametrization});
  if (!spec_.target) throw std::invalid_argument(name + ": kernel needs a target density");
  if (!spec_.polytope) throw std::invalid_argument(name + ": kernel needs a polytope");
  if (spec_.polytope->dim() != spec_.target->dim()) throw DimensionError(name + ": polytope/target dimension mismatch");
  if (!(spec_.step > 0.0) || !std::isfinite(spec_.step)) throw std::invalid_argument(name + ": step must be positive");
  if (is_hit_and_run(spec_.kind) && !spec_.step_distribution) {
    throw std::invalid_argument(name + ": Hit-&-Run kernels need a step distribution");
  }
  if (spec_.parametrization == StepParametrization::delta && !uses_target_metric(spec_.kind)) {
    throw std::invalid_argument(name + ": the delta parametrization applies to smmala/smhr/smlhr only");
  }
  if (uses_target_metric(spec_.kind)) {
    if (!spec_.metric) throw std::invalid_argument(name + ": manifold kernels need a metric tensor");
    if (spec_.parametrization == StepParametrization::delta) {
      spec_.metric = spec_.metric->with_delta(delta_from_lambda(spec_.step));
    }
  }
  if (uses_barrier(spec_.kind) && !spec_.metric) spec_.metric = make_barrier_metric(spec_.polytope);

  const double d = static_cast<double>(spec_.target->dim());
  switch (spec_.kind) {
    case SamplerKind::dikin:
      eps_ = spec_.step / std::sqrt(d);
      break;
    case SamplerKind::mapla:
      eps_ = std::sqrt(spec_.step);
      break;
    default:
      eps_ = spec_.parametrization == StepParametrization::delta ? 1.0 : spec_.step;
  }
}

LocalFrame ProposalKernel::prepare(const Vector& x) const {
  LocalFrame frame;
  frame.point = x;
  const Index d = x.size();
  if (d != dim()) throw DimensionError("prepare: point has the wrong dimension");

  Vector g;
  if (uses_gradient(spec_.kind)) {
    g = spec_.target->grad_log_density(x);
    if (!g.allFinite()) throw DomainError("prepare: non-finite gradient");
  }

  if (spec_.metric) {
    try {
      frame.factor = factorize(spec_.metric->metric_at(x), eps_);
      frame.metric_fallback = frame.factor.used_diagonal_fallback();
    } catch (const MetricError&) {
      if (uses_barrier(spec_.kind)) throw DomainError("prepare: barrier metric is not positive definite");
      frame.factor = FactorizedCovariance::isotropic(d, eps_);
      frame.isotropic_fallback = true;
    }
  } else {
    frame.factor = FactorizedCovariance::isotropic(d, eps_);
  }

  const double eps2_half = 0.5 * eps_ * eps_;
  switch (spec_.kind) {
    case SamplerKind::rwmh:
    case SamplerKind::hr:
    case SamplerKind::smhr:
    case SamplerKind::dikin:
      frame.center = x;
      break;
    case SamplerKind::mala:
      frame.center = x + eps2_half * g;
      frame.eps_hat = eps2_half;
      break;
    case SamplerKind::smmala:
    case SamplerKind::mapla:
      frame.center = x + eps2_half * frame.factor.inverse_metric_times(g);
      frame.eps_hat = eps2_half;
      break;
    case SamplerKind::lhr: {
      auto drift = clipped_drift(x, g, eps2_half, *spec_.polytope);
      frame.center = std::move(drift.mean);
      frame.eps_hat = drift.eps_hat;
      frame.clipped = drift.clipped;
      break;
    }
    case SamplerKind::smlhr: {
      auto drift = clipped_drift(x, frame.factor.inverse_metric_times(g), eps2_half, *spec_.polytope);
      frame.center = std::move(drift.mean);
      frame.eps_hat = drift.eps_hat;
      frame.clipped = drift.clipped;
      break;
    }
  }
  if (!frame.center.allFinite()) throw DomainError("prepare: non-finite proposal center");
  return frame;
}

Proposal ProposalKernel::propose(const LocalFrame& at, Rng& rng) const {
  if (is_hit_and_run(spec_.kind)) {
    Proposal out = ehr_propose(at.center, at.factor, *spec_.step_distribution, *spec_.polytope, rng);
    if (out.degenerate) out.y = at.point;
    return out;
  }
  const Vector z = rng.normal_vector(at.point.size());
  Proposal out;
  out.y = at.center + at.factor.apply(z);
  const double d = static_cast<double>(z.size());
  out.log_q_forward = -0.5 * d * std::log(2.0 * std::numbers::pi) - at.factor.log_abs_det() - 0.5 * z.squaredNorm();
  return out;
}

double ProposalKernel::log_q(const Vector& y, const LocalFrame& at) const {
  if (is_hit_and_run(spec_.kind)) {
    return ehr_log_q(y, at.center, at.factor, *spec_.step_distribution, *spec_.polytope);
  }
  return gaussian_log_q(y, at.center, at.factor);
}

std::shared_ptr<const ProposalKernel> make_kernel(KernelSpec spec) {
  return std::make_shared<const ProposalKernel>(std::move(spec));
}

}  // namespace polywalk
