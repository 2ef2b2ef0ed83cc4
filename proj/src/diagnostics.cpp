#include "polywalk/diagnostics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <utility>

namespace polywalk {

namespace {

// Biased autocorrelation ρ_t, t = 0..n-1, via zero-padded FFT.
std::vector<double> autocorrelation(std::span<const double> series, double mean) {
  const std::size_t n = series.size();
  std::size_t padded = 1;
  while (padded < 2 * n) padded <<= 1;
  std::vector<double> centered(padded, 0.0);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, centered);
  for (auto& c : spectrum) c = std::norm(c);
  std::vector<double> acov;
  fft.inv(acov, spectrum);

  std::vector<double> rho(n);
  const double variance = acov[0];
  for (std::size_t t = 0; t < n; ++t) rho[t] = acov[t] / variance;
  return rho;
}

std::vector<double> column(const Matrix& samples, Index j) {
  std::vector<double> out(static_cast<std::size_t>(samples.rows()));
  for (Index i = 0; i < samples.rows(); ++i) out[static_cast<std::size_t>(i)] = samples(i, j);
  return out;
}

}  // namespace

bool is_constant_series(std::span<const double> series) {
  return std::all_of(series.begin(), series.end(), [&](double v) { return v == series.front(); });
}

double effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 8) throw std::invalid_argument("effective_sample_size: need at least 8 values");
  if (!std::all_of(series.begin(), series.end(), [](double v) { return std::isfinite(v); })) {
    throw std::invalid_argument("effective_sample_size: non-finite values");
  }
  if (is_constant_series(series)) return 1.0;

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  const std::vector<double> rho = autocorrelation(series, mean);
  if (!(std::isfinite(rho[0]))) return 1.0;

  // Initial positive sequence of pair sums, made monotone.
  double tau = -1.0;
  double previous = kInfinity;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = rho[2 * k] + rho[2 * k + 1];
    if (!(pair > 0.0)) break;
    pair = std::min(pair, previous);
    tau += 2.0 * pair;
    previous = pair;
  }
  const double nd = static_cast<double>(n);
  if (!(tau > 0.0)) return nd;
  return std::clamp(nd / tau, 1.0, nd);
}

double min_marginal_ess(const Matrix& samples) { return min_marginal_ess(std::vector<Matrix>{samples}); }

double min_marginal_ess(const std::vector<Matrix>& chains) {
  if (chains.empty()) throw std::invalid_argument("min_marginal_ess: no chains");
  const Index d = chains.front().cols();
  double best = kInfinity;
  for (Index j = 0; j < d; ++j) {
    double total = 0.0;
    for (const auto& chain : chains) {
      if (chain.cols() != d) throw std::invalid_argument("min_marginal_ess: chains differ in dimension");
      const auto values = column(chain, j);
      total += effective_sample_size(values);
    }
    best = std::min(best, total);
  }
  return best;
}

Vector split_rhat(const std::vector<Matrix>& chains) {
  if (chains.empty()) throw std::invalid_argument("split_rhat: no chains");
  Index n = chains.front().rows();
  const Index d = chains.front().cols();
  for (const auto& chain : chains) {
    if (chain.cols() != d) throw std::invalid_argument("split_rhat: chains differ in dimension");
    n = std::min(n, chain.rows());
  }
  if (n < 4) throw std::invalid_argument("split_rhat: chains need at least 4 draws");
  const Index half = n / 2;
  const double L = static_cast<double>(half);

  std::vector<std::pair<Index, const Matrix*>> pieces;
  for (const auto& chain : chains) {
    pieces.emplace_back(0, &chain);
    pieces.emplace_back(n - half, &chain);
  }
  const double m = static_cast<double>(pieces.size());

  Vector rhat(d);
  for (Index j = 0; j < d; ++j) {
    Vector means(static_cast<Index>(pieces.size()));
    double within = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const auto segment = pieces[k].second->col(j).segment(pieces[k].first, half);
      const double mu = segment.mean();
      means[static_cast<Index>(k)] = mu;
      within += (segment.array() - mu).square().sum() / (L - 1.0);
    }
    within /= m;
    const double grand = means.mean();
    const double between = L * (means.array() - grand).square().sum() / (m - 1.0);
    // Rounding residue of a constant segment counts as zero variance.
    const double floor = 1e-14 * std::max(1.0, std::abs(grand));
    if (!(within > floor * floor)) {
      rhat[j] = kInfinity;
      continue;
    }
    const double pooled = (L - 1.0) / L * within + between / L;
    rhat[j] = std::sqrt(pooled / within);
  }
  return rhat;
}

double max_split_rhat(const std::vector<Matrix>& chains) { return split_rhat(chains).maxCoeff(); }

Histogram2D hist2d(const Matrix& samples, Index dim_x, Index dim_y, const HistogramGrid& grid) {
  return hist2d(std::vector<Matrix>{samples}, dim_x, dim_y, grid);
}

Histogram2D empty_histogram(const HistogramGrid& grid, Index dim_x, Index dim_y) {
  if (grid.nx < 1 || grid.ny < 1 || !(grid.x_lo < grid.x_hi) || !(grid.y_lo < grid.y_hi)) {
    throw std::invalid_argument("histogram: degenerate grid");
  }
  Histogram2D h;
  h.grid = grid;
  h.dim_x = dim_x;
  h.dim_y = dim_y;
  h.counts.assign(static_cast<std::size_t>(grid.nx * grid.ny), 0.0);
  return h;
}

void add_sample(Histogram2D& h, double x, double y) {
  bool clamped = false;
  auto bin = [&clamped](double v, double lo, double hi, int bins) {
    if (!(v >= lo && v <= hi)) clamped = true;
    const double pos = std::floor((v - lo) / (hi - lo) * bins);
    return static_cast<int>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
  };
  const int ix = bin(x, h.grid.x_lo, h.grid.x_hi, h.grid.nx);
  const int iy = bin(y, h.grid.y_lo, h.grid.y_hi, h.grid.ny);
  if (clamped) ++h.clamped;
  h.counts[static_cast<std::size_t>(ix * h.grid.ny + iy)] += 1.0;
  h.total += 1.0;
}

void merge_into(Histogram2D& h, const Histogram2D& other) {
  if (!(h.grid == other.grid) || h.dim_x != other.dim_x || h.dim_y != other.dim_y) {
    throw std::invalid_argument("merge_into: histograms use different grids");
  }
  for (std::size_t k = 0; k < h.counts.size(); ++k) h.counts[k] += other.counts[k];
  h.total += other.total;
  h.clamped += other.clamped;
}

Histogram2D hist2d(const std::vector<Matrix>& chains, Index dim_x, Index dim_y, const HistogramGrid& grid) {
  Histogram2D h = empty_histogram(grid, dim_x, dim_y);
  for (const auto& samples : chains) {
    if (dim_x < 0 || dim_y < 0 || dim_x >= samples.cols() || dim_y >= samples.cols()) {
      throw std::invalid_argument("hist2d: dimension index out of range");
    }
    for (Index i = 0; i < samples.rows(); ++i) add_sample(h, samples(i, dim_x), samples(i, dim_y));
  }
  if (h.total == 0.0) throw std::invalid_argument("hist2d: no samples");
  return h;
}

double l1_error(const Histogram2D& h, const Histogram2D& ref) {
  if (!(h.grid == ref.grid) || h.dim_x != ref.dim_x || h.dim_y != ref.dim_y) {
    throw std::invalid_argument("l1_error: histograms use different grids");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) sum += std::abs(h.counts[k] / h.total - ref.counts[k] / ref.total);
  return sum;
}

std::vector<RelativePerformance> relative_performance(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("relative_performance: no records");
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> sums;
  for (const auto& r : records) {
    auto& [sum, count] = sums[{r.problem_id, r.sampler}];
    sum += r.min_ess;
    ++count;
  }
  std::map<std::string, double> best;
  for (const auto& [key, value] : sums) {
    const double mean = value.first / static_cast<double>(value.second);
    auto [it, inserted] = best.emplace(key.first, mean);
    if (!inserted) it->second = std::max(it->second, mean);
  }
  std::vector<RelativePerformance> out;
  for (const auto& [key, value] : sums) {
    RelativePerformance row;
    row.problem_id = key.first;
    row.sampler = key.second;
    row.replicates = value.second;
    row.mean_min_ess = value.first / static_cast<double>(value.second);
    const double top = best.at(key.first);
    row.rel_perf = top > 0.0 ? row.mean_min_ess / top : 1.0;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace polywalk
