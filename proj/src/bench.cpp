#include "polywalk/bench.hpp"

#include "polywalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <regex>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace polywalk {

namespace {

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", value);
  return buffer;
}

template <typename T>
bool keep(const std::vector<T>& allowed, const T& value) {
  return allowed.empty() || std::find(allowed.begin(), allowed.end(), value) != allowed.end();
}

bool keep_real(const std::vector<double>& allowed, double value) {
  if (allowed.empty()) return true;
  return std::any_of(allowed.begin(), allowed.end(), [&](double a) { return std::abs(a - value) < 1e-9; });
}

struct DensityEntry {
  DensityKind kind;
  double mu;
};

DensityEntry parse_density_label(const std::string& label) {
  if (label == "funnel") return {DensityKind::funnel, 0.5};
  if (label == "bowtie") return {DensityKind::bowtie, 0.5};
  static const std::regex pattern(R"(^(gauss_(?:iso|disc|cigar))_mu(0|0\.5)$)");
  std::smatch match;
  if (!std::regex_match(label, match, pattern)) throw std::invalid_argument("unknown density label '" + label + "'");
  return {parse_density_kind(match[1]), std::stod(match[2])};
}

}  // namespace

std::string to_string(PolytopeKind kind) { return kind == PolytopeKind::cone ? "cone" : "diamond"; }

PolytopeKind parse_polytope_kind(const std::string& text) {
  if (text == "cone") return PolytopeKind::cone;
  if (text == "diamond") return PolytopeKind::diamond;
  throw std::invalid_argument("unknown polytope kind '" + text + "'");
}

namespace grid_axes {

std::vector<std::string> density_labels() {
  return {"funnel",          "bowtie",           "gauss_iso_mu0",     "gauss_iso_mu0.5",
          "gauss_disc_mu0",  "gauss_disc_mu0.5", "gauss_cigar_mu0",   "gauss_cigar_mu0.5"};
}

std::vector<double> log10_sigmas() { return {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0}; }

std::vector<double> thetas() { return {9.0, 19.0, 45.0, 90.0}; }

std::vector<Index> dimensions() { return {2, 4, 8, 16, 32}; }

}  // namespace grid_axes

double ProblemSpec::sigma() const { return std::pow(10.0, log10_sigma); }

std::string ProblemSpec::density_label() const {
  if (!is_gaussian(density)) return to_string(density);
  return to_string(density) + "_mu" + format_number(mu);
}

std::string ProblemSpec::density_group() const {
  if (!is_gaussian(density)) return "Bowtie / Funnel";
  return "Gauss (mu=" + format_number(mu) + ")";
}

std::string ProblemSpec::id() const {
  return density_label() + "_" + to_string(polytope) + format_number(theta_open) + "_d" + std::to_string(d) + "_ls" +
         format_number(log10_sigma);
}

ProblemSpec ProblemSpec::parse_id(const std::string& id) {
  static const std::regex pattern(R"(^(.+)_(cone|diamond)([0-9.]+)_d([0-9]+)_ls(-?[0-9.]+)$)");
  std::smatch match;
  if (!std::regex_match(id, match, pattern)) throw std::invalid_argument("malformed problem id '" + id + "'");
  ProblemSpec spec;
  const auto density = parse_density_label(match[1]);
  spec.density = density.kind;
  spec.mu = density.mu;
  spec.polytope = parse_polytope_kind(match[2]);
  spec.theta_open = std::stod(match[3]);
  spec.d = std::stol(match[4]);
  spec.log10_sigma = std::stod(match[5]);
  spec.validate();
  return spec;
}

void ProblemSpec::validate() const {
  if (d < 2) throw std::invalid_argument("problem dimension must be >= 2");
  if (!(theta_open > 0.0 && theta_open <= 90.0)) throw std::invalid_argument("problem angle must lie in (0, 90]");
  if (!std::isfinite(log10_sigma)) throw std::invalid_argument("problem scale must be finite");
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mode placement must lie in [0, 1]");
}

Problem build_problem(const ProblemSpec& spec) {
  spec.validate();
  Problem problem;
  problem.spec = spec;
  problem.polytope = std::make_shared<const Polytope>(
      spec.polytope == PolytopeKind::cone ? make_cone(spec.d, spec.theta_open) : make_diamond(spec.d, spec.theta_open));
  problem.target = place_target(spec.density, spec.d, spec.sigma(), *problem.polytope, spec.mu);
  problem.x0 = default_x0(*problem.polytope);
  return problem;
}

std::vector<ProblemSpec> problem_grid(const GridFilter& filter) {
  std::vector<ProblemSpec> out;
  for (const auto& label : grid_axes::density_labels()) {
    if (!keep(filter.densities, label)) continue;
    const auto density = parse_density_label(label);
    for (double ls : grid_axes::log10_sigmas()) {
      if (!keep_real(filter.log10_sigmas, ls)) continue;
      for (auto poly : {PolytopeKind::cone, PolytopeKind::diamond}) {
        if (!keep(filter.polytopes, to_string(poly))) continue;
        for (double theta : grid_axes::thetas()) {
          if (!keep_real(filter.thetas, theta)) continue;
          for (Index d : grid_axes::dimensions()) {
            if (!keep(filter.dims, d)) continue;
            out.push_back({density.kind, density.mu, d, ls, poly, theta});
          }
        }
      }
    }
  }
  return out;
}

GroundTruthConfig GroundTruthConfig::paper_scale() {
  GroundTruthConfig cfg;
  cfg.base_len = 1000000;
  cfg.gaussian_length_factor = 10.0;
  return cfg;
}

std::size_t ground_truth_steps(const GroundTruthConfig& cfg, Index d) {
  const double dd = static_cast<double>(d);
  const double factor = d >= 2 ? dd * std::log2(dd) : 1.0;
  return static_cast<std::size_t>(std::llround(static_cast<double>(cfg.base_len) * factor));
}

std::size_t ground_truth_steps(const GroundTruthConfig& cfg, const ProblemSpec& spec) {
  const double base = static_cast<double>(ground_truth_steps(cfg, spec.d));
  if (!is_gaussian(spec.density)) return static_cast<std::size_t>(base);
  return static_cast<std::size_t>(std::llround(base * cfg.gaussian_length_factor));
}

namespace {

ProposalKernel ground_truth_kernel(const Problem& problem) {
  KernelSpec kernel_spec;
  kernel_spec.kind = SamplerKind::hr;
  kernel_spec.step = 1.0;
  kernel_spec.target = problem.target;
  kernel_spec.polytope = problem.polytope;
  kernel_spec.step_distribution = make_half_normal(problem.spec.sigma());
  return ProposalKernel(kernel_spec);
}

double quantile(std::vector<double>& xs, double q) {
  const auto k = static_cast<std::size_t>(q * static_cast<double>(xs.size() - 1));
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end());
  return xs[k];
}

void fit_axis(std::vector<double>& xs, double q, double& lo, double& hi) {
  const double a = quantile(xs, q);
  const double b = quantile(xs, 1.0 - q);
  const double pad = 0.05 * (b - a);
  if (!(b - a > 1e-12 * std::max(1.0, std::abs(a)))) return;
  lo = std::max(lo, a - pad);
  hi = std::min(hi, b + pad);
}

}  // namespace

HistogramGrid fitted_grid(const ProblemSpec& spec, const GroundTruthConfig& cfg) {
  if (!(cfg.range_quantile > 0.0 && cfg.range_quantile < 0.5)) {
    throw std::invalid_argument("range_quantile must lie in (0, 0.5)");
  }
  const Problem problem = build_problem(spec);
  const ProposalKernel kernel = ground_truth_kernel(problem);
  const std::size_t pilot = std::max<std::size_t>(ground_truth_steps(cfg, spec) / 10, 1000);
  ChainConfig chain_cfg;
  chain_cfg.n_kept = std::min<std::size_t>(pilot, 100000);
  chain_cfg.thin = (pilot + chain_cfg.n_kept - 1) / chain_cfg.n_kept;
  chain_cfg.burn_in = static_cast<std::size_t>(cfg.burn_in_fraction * static_cast<double>(pilot));
  chain_cfg.seed = cfg.seed + cfg.n_chains;
  std::vector<double> xs, ys;
  xs.reserve(chain_cfg.n_kept);
  ys.reserve(chain_cfg.n_kept);
  run_chain_visit(kernel, *problem.target, *problem.polytope, problem.x0, chain_cfg, [&](const Vector& x) {
    xs.push_back(x[0]);
    ys.push_back(x[1]);
  });
  HistogramGrid grid = cfg.grid;
  fit_axis(xs, cfg.range_quantile, grid.x_lo, grid.x_hi);
  fit_axis(ys, cfg.range_quantile, grid.y_lo, grid.y_hi);
  if (!(grid.x_hi > grid.x_lo && grid.y_hi > grid.y_lo)) return cfg.grid;
  return grid;
}

Histogram2D ground_truth(const ProblemSpec& spec, const GroundTruthConfig& cfg) {
  const Problem problem = build_problem(spec);
  const ProposalKernel kernel = ground_truth_kernel(problem);
  const HistogramGrid grid = cfg.adaptive_range ? fitted_grid(spec, cfg) : cfg.grid;

  const std::size_t steps = ground_truth_steps(cfg, spec);
  ChainConfig chain_cfg;
  chain_cfg.n_kept = steps;
  chain_cfg.burn_in = static_cast<std::size_t>(cfg.burn_in_fraction * static_cast<double>(steps));

  std::vector<Histogram2D> parts(cfg.n_chains, empty_histogram(grid));
  auto run_one = [&](std::size_t c) {
    ChainConfig local = chain_cfg;
    local.seed = cfg.seed + c;
    Histogram2D& h = parts[c];
    run_chain_visit(kernel, *problem.target, *problem.polytope, problem.x0, local,
                    [&h](const Vector& x) { add_sample(h, x[0], x[1]); });
  };
  const std::size_t workers = std::min(cfg.n_chains, worker_count());
  if (workers <= 1) {
    for (std::size_t c = 0; c < cfg.n_chains; ++c) run_one(c);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < cfg.n_chains; c += workers) {
          try {
            run_one(c);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  Histogram2D pooled = empty_histogram(grid);
  for (const auto& part : parts) merge_into(pooled, part);
  return pooled;
}

RunConfig RunConfig::paper_scale() {
  RunConfig cfg;
  cfg.n_kept = 20000;
  return cfg;
}

std::vector<double> default_step_grid() {
  std::vector<double> steps;
  for (int k = 0; k < 13; ++k) steps.push_back(std::pow(10.0, -2.0 + 3.0 * k / 12.0));
  return steps;
}

std::string default_metric_name(DensityKind density) { return is_gaussian(density) ? "hessian" : "sc_sq_hessian"; }

std::shared_ptr<const ProposalKernel> make_problem_kernel(const Problem& problem, SamplerId sampler, double step,
                                                          const RunConfig& cfg) {
  KernelSpec spec;
  spec.kind = sampler.kind;
  spec.parametrization = sampler.parametrization;
  spec.step = step;
  spec.target = problem.target;
  spec.polytope = problem.polytope;
  const int d = static_cast<int>(problem.spec.d);
  if (is_hit_and_run(sampler.kind)) {
    if (cfg.step_distribution == "chi") {
      spec.step_distribution = make_chi(d);
    } else if (cfg.step_distribution == "half_normal") {
      spec.step_distribution = make_half_normal_matched(d, cfg.moment);
    } else {
      throw std::invalid_argument("unknown step distribution '" + cfg.step_distribution + "'");
    }
  }
  if (uses_target_metric(sampler.kind)) {
    const std::string name = cfg.metric.empty() ? default_metric_name(problem.spec.density) : cfg.metric;
    spec.metric = make_metric(name, problem.target, problem.polytope, cfg.fixed_delta);
  }
  return make_kernel(std::move(spec));
}

RunRecord evaluate_run(const Problem& problem, SamplerId sampler, double step, const RunConfig& cfg,
                       const Histogram2D& truth) {
  const auto kernel = make_problem_kernel(problem, sampler, step, cfg);
  ChainConfig chain_cfg;
  chain_cfg.n_kept = cfg.n_kept;
  chain_cfg.thin = cfg.thin == 0 ? static_cast<std::size_t>(problem.spec.d) : cfg.thin;
  chain_cfg.burn_in = cfg.burn_in;
  chain_cfg.seed = cfg.seed;
  chain_cfg.tol = cfg.tol;
  const auto results =
      run_ensemble(*kernel, *problem.target, *problem.polytope, problem.x0, chain_cfg, cfg.n_chains, cfg.threads);

  std::vector<Matrix> chains;
  RunRecord record;
  record.problem_id = problem.spec.id();
  record.sampler = to_string(sampler);
  record.param_kind = sampler.parametrization == StepParametrization::delta ? "delta" : "epsilon";
  record.step = step;
  record.seed = cfg.seed;
  std::size_t steps = 0;
  std::size_t accepted = 0;
  for (const auto& r : results) {
    for (Index i = 0; i < r.samples.rows(); ++i) {
      if (!problem.polytope->contains(r.samples.row(i).transpose(), cfg.tol)) {
        throw DomainError("evaluate_run: infeasible retained sample in " + record.problem_id);
      }
    }
    chains.push_back(r.samples);
    record.wall_time_s += r.stats.wall_time_s;
    record.degenerate_events += r.stats.degenerate_events();
    steps += r.stats.steps;
    accepted += r.stats.accepted;
  }
  record.accept_rate = steps == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(steps);
  record.min_ess = min_marginal_ess(chains);
  record.min_ess_per_sec = record.wall_time_s > 0.0 ? record.min_ess / record.wall_time_s : 0.0;
  record.rhat_max = max_split_rhat(chains);
  record.l1 = l1_error(hist2d(chains, truth.dim_x, truth.dim_y, truth.grid), truth);
  return record;
}

std::size_t select_best(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw std::invalid_argument("select_best: no runs");
  auto better = [](const RunRecord& a, const RunRecord& b) {
    if (a.l1 != b.l1) return a.l1 < b.l1;
    if (a.min_ess != b.min_ess) return a.min_ess > b.min_ess;
    return a.step < b.step;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (better(runs[i], runs[best])) best = i;
  }
  return best;
}

GridSearchResult grid_search(const Problem& problem, SamplerId sampler, const std::vector<double>& steps,
                             const RunConfig& cfg, const Histogram2D& truth) {
  if (steps.empty()) throw std::invalid_argument("grid_search: empty step grid");
  GridSearchResult result;
  for (double step : steps) result.runs.push_back(evaluate_run(problem, sampler, step, cfg, truth));
  result.best = result.runs[select_best(result.runs)];
  return result;
}

Report aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  Report report;

  std::map<std::tuple<std::string, std::string, double>, std::pair<double, std::size_t>> l1_sums;
  std::map<std::string, std::optional<ProblemSpec>> specs;
  for (const auto& r : records) {
    auto [it, inserted] = specs.emplace(r.problem_id, std::nullopt);
    if (inserted) {
      try {
        it->second = ProblemSpec::parse_id(r.problem_id);
      } catch (const std::invalid_argument&) {
      }
    }
    const auto& spec = it->second;
    auto& cell = l1_sums[{r.sampler, spec ? spec->density_group() : "other", spec ? spec->theta_open : 0.0}];
    cell.first += r.l1;
    ++cell.second;
  }
  for (const auto& [key, value] : l1_sums) {
    report.l1_table.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                               value.first / static_cast<double>(value.second), value.second});
  }

  report.per_problem = relative_performance(records);
  std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, std::size_t>> rel_sums;
  for (const auto& row : report.per_problem) {
    const auto& spec = specs.at(row.problem_id);
    if (!spec) continue;
    const std::pair<std::string, std::string> axes[] = {{"theta", format_number(spec->theta_open)},
                                                        {"log10_sigma", format_number(spec->log10_sigma)},
                                                        {"d", std::to_string(spec->d)},
                                                        {"group", spec->density_group()}};
    for (const auto& [axis, value] : axes) {
      auto& cell = rel_sums[{row.sampler, axis, value}];
      cell.first += row.rel_perf;
      ++cell.second;
    }
  }
  for (const auto& [key, value] : rel_sums) {
    report.rel_perf.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                               value.first / static_cast<double>(value.second), value.second});
  }
  return report;
}

}  // namespace polywalk
