#include "polywalk/chain.hpp"

#include "polywalk/errors.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace polywalk {

void ChainConfig::validate() const {
  if (n_kept < 1) throw std::invalid_argument("chain config: n_kept must be >= 1");
  if (thin < 1) throw std::invalid_argument("chain config: thin must be >= 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("chain config: tolerance must be >= 0");
}

ChainState init_chain_state(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P,
                            const Vector& x0, double tol) {
  if (!P.contains(x0, tol)) throw DomainError("initial point is not feasible");
  ChainState state;
  state.x = x0;
  state.log_phi = target.log_density(x0);
  if (!std::isfinite(state.log_phi)) throw DomainError("log-density is not finite at the initial point");
  state.frame = kernel.prepare(x0);
  return state;
}

StepOutcome mh_step(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P, ChainState& state,
                    Rng& rng, double tol) {
  ++state.stats.steps;
  const Proposal proposal = kernel.propose(state.frame, rng);
  if (proposal.degenerate) {
    ++state.stats.degenerate_chords;
    return {};
  }
  if (!P.contains(proposal.y, tol)) {
    ++state.stats.infeasible_proposals;
    return {};
  }
  const double log_phi_y = target.log_density(proposal.y);
  if (!std::isfinite(log_phi_y)) return {};

  LocalFrame frame_y;
  try {
    frame_y = kernel.prepare(proposal.y);
  } catch (const DomainError&) {
    ++state.stats.reverse_failures;
    return {};
  } catch (const MetricError&) {
    ++state.stats.reverse_failures;
    return {};
  }
  const double log_reverse = kernel.log_q(state.x, frame_y);
  StepOutcome outcome;
  outcome.log_alpha = (log_phi_y - state.log_phi) + (log_reverse - proposal.log_q_forward);
  if (std::isnan(outcome.log_alpha)) outcome.log_alpha = -kInfinity;
  if (outcome.log_alpha == -kInfinity) return outcome;

  if (outcome.log_alpha >= 0.0 || std::log(rng.uniform()) < outcome.log_alpha) {
    outcome.accepted = true;
    ++state.stats.accepted;
    if (frame_y.metric_fallback) ++state.stats.diagonal_fallbacks;
    if (frame_y.isotropic_fallback) ++state.stats.isotropic_fallbacks;
    state.x = proposal.y;
    state.log_phi = log_phi_y;
    state.frame = std::move(frame_y);
  }
  return outcome;
}

ChainStats run_chain_visit(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P,
                           const Vector& x0, const ChainConfig& cfg, const std::function<void(const Vector&)>& visit) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ChainState state = init_chain_state(kernel, target, P, x0, cfg.tol);
  Rng rng(cfg.seed);

  for (std::size_t i = 0; i < cfg.burn_in; ++i) mh_step(kernel, target, P, state, rng, cfg.tol);
  for (std::size_t k = 0; k < cfg.n_kept; ++k) {
    for (std::size_t t = 0; t < cfg.thin; ++t) mh_step(kernel, target, P, state, rng, cfg.tol);
    visit(state.x);
  }
  state.stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return state.stats;
}

ChainResult run_chain(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P, const Vector& x0,
                      const ChainConfig& cfg) {
  ChainResult result;
  result.seed = cfg.seed;
  result.samples.resize(static_cast<Index>(cfg.n_kept), x0.size());
  Index row = 0;
  result.stats = run_chain_visit(kernel, target, P, x0, cfg,
                                 [&](const Vector& x) { result.samples.row(row++) = x.transpose(); });
  return result;
}

std::size_t worker_count() {
  std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("POLYWALK_THREADS")) {
    try {
      const long value = std::stol(cap);
      if (value >= 1) workers = std::min(workers, static_cast<std::size_t>(value));
    } catch (const std::exception&) {
      // unparsable cap: ignore
    }
  }
  return workers;
}

std::vector<ChainResult> run_ensemble(const ProposalKernel& kernel, const TargetDensity& target, const Polytope& P,
                                      const Vector& x0, const ChainConfig& cfg, std::size_t n_chains,
                                      std::size_t threads) {
  if (n_chains < 1) throw std::invalid_argument("run_ensemble: need at least one chain");
  std::vector<ChainResult> results(n_chains);
  const std::size_t workers = std::min(n_chains, threads == 0 ? worker_count() : threads);

  auto run_one = [&](std::size_t i) {
    ChainConfig chain_cfg = cfg;
    chain_cfg.seed = cfg.seed + i;
    results[i] = run_chain(kernel, target, P, x0, chain_cfg);
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_chains; ++i) run_one(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n_chains; i = next++) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

namespace {

bool strictly_interior(const Polytope& P, const Vector& x) { return (P.slacks(x).array() > 0.0).all(); }

// Minimizes τ·log Σ exp((âᵢᵀx − b̂ᵢ)/τ) over x for a decreasing τ, on unit-normalized rows.
Vector reduce_violation(const Matrix& A, const Vector& b, Vector x) {
  const Index d = A.cols();
  auto smoothed = [&](const Vector& y, double tau) {
    const Vector r = (A * y - b) / tau;
    const double top = r.maxCoeff();
    return tau * (top + std::log((r.array() - top).exp().sum()));
  };
  for (double tau = 1.0; tau > 1e-8; tau *= 0.5) {
    for (int iter = 0; iter < 50; ++iter) {
      const Vector r = (A * x - b) / tau;
      if ((A * x - b).maxCoeff() < 0.0 && tau < 1e-3) return x;
      const Vector p = (r.array() - r.maxCoeff()).exp();
      const Vector w = p / p.sum();
      const Vector grad = A.transpose() * w;
      const Vector mean_row = grad;
      Matrix H = (A.transpose() * w.asDiagonal() * A - mean_row * mean_row.transpose()) / tau;
      H.diagonal().array() += 1e-10;
      const Vector step = -H.ldlt().solve(grad);
      const double f0 = smoothed(x, tau);
      double t = 1.0;
      while (t > 1e-12 && smoothed(x + t * step, tau) > f0 + 1e-4 * t * grad.dot(step)) t *= 0.5;
      if (t <= 1e-12) break;
      x += t * step;
      if (grad.norm() < 1e-12 * d) break;
    }
    if ((A * x - b).maxCoeff() < 0.0) return x;
  }
  return x;
}

// Damped Newton on −Σ log(slack) from a strictly interior point.
Vector toward_analytic_center(const Matrix& A, const Vector& b, Vector x) {
  auto barrier = [&](const Vector& y) {
    const Vector s = b - A * y;
    if ((s.array() <= 0.0).any()) return kInfinity;
    return -s.array().log().sum();
  };
  for (int iter = 0; iter < 50; ++iter) {
    const Vector s = b - A * x;
    const Vector inv = s.cwiseInverse();
    const Vector grad = A.transpose() * inv;
    Matrix H = A.transpose() * inv.cwiseAbs2().asDiagonal() * A;
    H.diagonal().array() += 1e-12 * (1.0 + H.diagonal().maxCoeff());
    const Vector step = -H.ldlt().solve(grad);
    const double decrement = -grad.dot(step);
    if (!(decrement > 1e-10)) break;
    const double f0 = barrier(x);
    double t = 1.0;
    while (t > 1e-12 && !(barrier(x + t * step) <= f0 - 0.25 * t * decrement)) t *= 0.5;
    if (t <= 1e-12) break;
    x += t * step;
  }
  return x;
}

}  // namespace

Vector default_x0(const Polytope& P) {
  const Index d = P.dim();
  const Vector origin = Vector::Zero(d);
  if (P.contains(origin, 0.0)) {
    const double exit = diagonal_exit(P);
    if (std::isfinite(exit) && exit > 0.0) {
      Vector mid = Vector::Constant(d, 0.5 * exit);
      if (strictly_interior(P, mid)) return mid;
    }
  }
  const Vector norms = P.A().rowwise().norm();
  const Matrix A = norms.cwiseInverse().asDiagonal() * P.A();
  const Vector b = P.b().cwiseQuotient(norms);
  Vector x = reduce_violation(A, b, origin);
  if (!strictly_interior(P, x)) throw DomainError("default_x0: no strictly interior point found");
  x = toward_analytic_center(A, b, x);
  if (!strictly_interior(P, x)) throw DomainError("default_x0: lost interiority while centering");
  return x;
}

}  // namespace polywalk
