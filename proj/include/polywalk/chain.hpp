#pragma once

#include "polywalk/geometry.hpp"
#include "polywalk/proposals.hpp"
#include "polywalk/rng.hpp"
#include "polywalk/targets.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace polywalk {

struct ChainConfig {
  std::size_t n_kept = 1000;
  std::size_t thin = 1;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  double tol = kDefaultTolerance;

  void validate() const;
};

struct ChainStats {
  std::size_t steps = 0;
  std::size_t accepted = 0;
  std::size_t infeasible_proposals = 0;
  /// Hit-&-Run chords shorter than kDegenerateChord (counted as rejections).
  std::size_t degenerate_chords = 0;
  /// Proposals rejected because the frame at y could not be built.
  std::size_t reverse_failures = 0;
  std::size_t diagonal_fallbacks = 0;
  std::size_t isotropic_fallbacks = 0;
  double wall_time_s = 0.0;

  double acceptance_rate() const { return steps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(steps); }
  std::size_t degenerate_events() const { return degenerate_chords + reverse_failures + isotropic_fallbacks; }
};

/// Current point with its cached log-density and proposal frame.
struct ChainState {
  Vector x;
  double log_phi = 0.0;
  LocalFrame frame;
  ChainStats stats;
};

/// Throws DomainError if x0 is infeasible at `tol`, log φ(x0) is not finite, or no frame can be built at x0.
ChainState init_chain_state(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P,
                            const Vector& x0, double tol = kDefaultTolerance);

struct StepOutcome {
  bool accepted = false;
  double log_alpha = -kInfinity;
};

/// One Metropolis-Hastings transition:
/// log α = log φ(y) − log φ(x) + log q(x|y) − log q(y|x); infeasible y has α = 0.
StepOutcome mh_step(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P, ChainState& state,
                    Rng& rng, double tol = kDefaultTolerance);

struct ChainResult {
  /// n_kept × d; row k is the state after burn_in + (k+1)·thin steps.
  Matrix samples;
  ChainStats stats;
  std::uint64_t seed = 0;
};

ChainResult run_chain(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P, const Vector& x0,
                      const ChainConfig& cfg);

/// Same schedule as run_chain, but hands every kept state to `visit` instead of storing it.
/// The returned stats carry the wall time of the whole run.
ChainStats run_chain_visit(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P,
                           const Vector& x0, const ChainConfig& cfg, const std::function<void(const Vector&)>& visit);

/// n_chains independent chains with seeds cfg.seed + i, returned in chain order.
/// `threads` = 0 uses worker_count().
std::vector<ChainResult> run_ensemble(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P,
                                      const Vector& x0, const ChainConfig& cfg, std::size_t n_chains,
                                      std::size_t threads = 0);

/// Hardware concurrency, capped by the POLYWALK_THREADS environment variable.
std::size_t worker_count();

/// Midpoint of the diagonal chord 0.5·t*·(1,…,1) when that point is strictly interior, otherwise
/// an interior point found by minimizing the smoothed maximum constraint violation followed by
/// damped Newton steps toward the analytic center. Throws DomainError if no interior point exists.
Vector default_x0(const Polytope& P);

}  // namespace polywalk
