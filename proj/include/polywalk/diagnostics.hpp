#pragma once

#include "polywalk/geometry.hpp"
#include "polywalk/records.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace polywalk {

/// Effective sample size n/τ with τ from Geyer's initial monotone sequence estimator,
/// clipped to [1, n]. A constant series gives 1. Throws std::invalid_argument for n < 8 or
/// non-finite values.
double effective_sample_size(std::span<const double> series);
/// True when the series has zero variance (its ESS is reported as 1).
bool is_constant_series(std::span<const double> series);

/// Minimum over columns of the per-column ESS.
double min_marginal_ess(const Matrix& samples);
/// Per-chain ESS summed per column, then minimized over columns.
double min_marginal_ess(const std::vector<Matrix>& chains);

/// Split-chain potential scale reduction per column; +inf where the within-chain variance is 0.
/// Chains longer than the shortest one are truncated to it.
Vector split_rhat(const std::vector<Matrix>& chains);
/// Largest entry of split_rhat.
double max_split_rhat(const std::vector<Matrix>& chains);

struct HistogramGrid {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
  int nx = 10;
  int ny = 10;

  bool operator==(const HistogramGrid&) const = default;
};

/// Normalized joint histogram of two sample dimensions.
struct Histogram2D {
  HistogramGrid grid;
  Index dim_x = 0;
  Index dim_y = 1;
  /// Row-major nx × ny counts.
  std::vector<double> counts;
  double total = 0.0;
  /// Samples that fell outside the grid and were counted in the nearest edge bin.
  std::size_t clamped = 0;

  double mass(int ix, int iy) const { return counts[static_cast<std::size_t>(ix * grid.ny + iy)] / total; }
};

/// Zero-count histogram; throws std::invalid_argument on a degenerate grid.
Histogram2D empty_histogram(const HistogramGrid& grid, Index dim_x = 0, Index dim_y = 1);
/// Adds one sample; values outside the grid go to the nearest edge bin and are counted in `clamped`.
void add_sample(Histogram2D& h, double x, double y);
/// Adds the counts of `other` (same grid and dims) to `h`.
void merge_into(Histogram2D& h, const Histogram2D& other);

/// Throws std::invalid_argument on empty input, a degenerate grid or out-of-range dims.
Histogram2D hist2d(const Matrix& samples, Index dim_x, Index dim_y, const HistogramGrid& grid = {});
/// Pools all chains into one histogram.
Histogram2D hist2d(const std::vector<Matrix>& chains, Index dim_x, Index dim_y, const HistogramGrid& grid = {});

/// Σ |p̂ − p| over bins. Throws std::invalid_argument if the grids or dims differ.
double l1_error(const Histogram2D& h, const Histogram2D& ref);

struct RelativePerformance {
  std::string problem_id;
  std::string sampler;
  double mean_min_ess = 0.0;
  /// mean_min_ess divided by the best mean on the same problem; the best sampler gets 1.
  double rel_perf = 0.0;
  std::size_t replicates = 0;
};

/// Groups records by problem and sampler, averages min-ESS over replicates and normalizes by
/// the best sampler per problem. Output is sorted by (problem, sampler).
std::vector<RelativePerformance> relative_performance(const std::vector<RunRecord>& records);

}  // namespace polywalk
