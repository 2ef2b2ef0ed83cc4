#pragma once

#include "polywalk/chain.hpp"
#include "polywalk/diagnostics.hpp"
#include "polywalk/geometry.hpp"
#include "polywalk/proposals.hpp"
#include "polywalk/records.hpp"
#include "polywalk/steps.hpp"
#include "polywalk/targets.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace polywalk {

enum class PolytopeKind { cone, diamond };

std::string to_string(PolytopeKind kind);
PolytopeKind parse_polytope_kind(const std::string& text);

/// Axis values of the full benchmark grid.
namespace grid_axes {
/// funnel, bowtie, and the three Gaussians at μ = 0 and μ = 0.5.
std::vector<std::string> density_labels();
/// log10 σ ∈ {−2, −1.5, …, 1}.
std::vector<double> log10_sigmas();
std::vector<double> thetas();
std::vector<Index> dimensions();
}  // namespace grid_axes

/// One benchmark problem: a placed density inside a tilted polytope.
struct ProblemSpec {
  DensityKind density = DensityKind::gauss_iso;
  /// Mode placement along the diagonal; always 0.5 for funnel and bowtie.
  double mu = 0.5;
  Index d = 2;
  double log10_sigma = 0.0;
  PolytopeKind polytope = PolytopeKind::cone;
  double theta_open = 90.0;

  double sigma() const;
  /// "funnel", "bowtie" or "gauss_<shape>_mu<μ>".
  std::string density_label() const;
  /// "Bowtie / Funnel", "Gauss (mu=0)" or "Gauss (mu=0.5)" grouping used in the L1 table.
  std::string density_group() const;
  /// Unique key, e.g. "gauss_iso_mu0.5_cone19_d4_ls-1.5".
  std::string id() const;
  /// Inverse of id(). Throws std::invalid_argument on malformed ids.
  static ProblemSpec parse_id(const std::string& id);
  /// Throws std::invalid_argument for values outside the constructible range.
  void validate() const;

  bool operator==(const ProblemSpec&) const = default;
};

struct Problem {
  ProblemSpec spec;
  std::shared_ptr<const Polytope> polytope;
  TargetPtr target;
  Vector x0;
};

Problem build_problem(const ProblemSpec& spec);

/// Axis restrictions; an empty list keeps the whole axis.
struct GridFilter {
  std::vector<std::string> densities;
  std::vector<double> log10_sigmas;
  std::vector<std::string> polytopes;
  std::vector<double> thetas;
  std::vector<Index> dims;
};

/// Cartesian product densities × scales × polytopes × angles × dimensions (2240 entries unfiltered).
std::vector<ProblemSpec> problem_grid(const GridFilter& filter = {});

struct GroundTruthConfig {
  /// Steps per chain are base_len·d·log₂d.
  std::size_t base_len = 200000;
  std::size_t n_chains = 4;
  std::uint64_t seed = 1000;
  /// Fraction of each chain discarded before binning.
  double burn_in_fraction = 0.1;
  /// Extra length multiplier for the Gaussian targets.
  double gaussian_length_factor = 1.0;
  /// Bin count and outer bounds. With adaptive_range the bin edges shrink to the
  /// [range_quantile, 1 − range_quantile] range of a pilot run, padded by 5% and kept inside these bounds.
  HistogramGrid grid;
  bool adaptive_range = true;
  double range_quantile = 1e-3;

  static GroundTruthConfig paper_scale();
};

std::size_t ground_truth_steps(const GroundTruthConfig& cfg, Index d);
/// Steps per chain for one problem, including the Gaussian multiplier.
std::size_t ground_truth_steps(const GroundTruthConfig& cfg, const ProblemSpec& spec);

/// Pooled histogram of the first two dimensions from long Hit-&-Run runs with a half-normal step
/// of scale σ; the chains are binned on the fly.
Histogram2D ground_truth(const ProblemSpec& spec, const GroundTruthConfig& cfg);

/// Histogram range fitted to a pilot run of one tenth of the ground-truth length (at most 10⁵ kept points).
HistogramGrid fitted_grid(const ProblemSpec& spec, const GroundTruthConfig& cfg);

struct RunConfig {
  std::size_t n_kept = 5000;
  /// 0 means thin by d.
  std::size_t thin = 0;
  std::size_t burn_in = 0;
  std::size_t n_chains = 4;
  std::uint64_t seed = 0;
  /// Metric name override for the manifold kinds; empty selects the default per density.
  std::string metric;
  /// δ of the metric under the epsilon parametrization.
  double fixed_delta = 1e-6;
  /// "half_normal" (moment-matched to χ_d) or "chi".
  std::string step_distribution = "half_normal";
  MomentMatch moment = MomentMatch::second;
  HistogramGrid grid;
  double tol = kDefaultTolerance;
  /// 0 uses worker_count().
  std::size_t threads = 0;

  static RunConfig paper_scale();
};

/// 13 log-uniform values over [1e-2, 1e1].
std::vector<double> default_step_grid();

/// Metric used for the manifold kinds when RunConfig::metric is empty: the Hessian for the
/// Gaussians, the scaled squared Hessian for funnel and bowtie.
std::string default_metric_name(DensityKind density);

std::shared_ptr<const ProposalKernel> make_problem_kernel(const Problem& problem, SamplerId sampler, double step,
                                                          const RunConfig& cfg);

/// Runs the chain ensemble at one step value and scores it against the ground truth.
/// Throws DomainError if a retained sample is infeasible.
RunRecord evaluate_run(const Problem& problem, SamplerId sampler, double step, const RunConfig& cfg,
                       const Histogram2D& truth);

struct GridSearchResult {
  RunRecord best;
  std::vector<RunRecord> runs;
};

/// Minimum-L1 selection; ties go to the larger min-ESS, then to the smaller step.
std::size_t select_best(const std::vector<RunRecord>& runs);

GridSearchResult grid_search(const Problem& problem, SamplerId sampler, const std::vector<double>& steps,
                             const RunConfig& cfg, const Histogram2D& truth);

struct L1Cell {
  std::string sampler;
  std::string group;
  double theta = 0.0;
  double mean_l1 = 0.0;
  std::size_t count = 0;
};

struct RelPerfCell {
  std::string sampler;
  /// "theta", "log10_sigma", "d" or "group".
  std::string axis;
  std::string value;
  double mean_rel_perf = 0.0;
  std::size_t count = 0;
};

struct Report {
  std::vector<L1Cell> l1_table;
  std::vector<RelPerfCell> rel_perf;
  std::vector<RelativePerformance> per_problem;
};

/// Mean L1 per (sampler, density group, angle) and mean relative performance per
/// (sampler, axis value). Records whose problem id does not parse are grouped under "other".
Report aggregate(const std::vector<RunRecord>& records);

}  // namespace polywalk
