// polywalk command line: problem grids, ground truth, sampling, benchmarking and reports.

#include "polywalk/bench.hpp"
#include "polywalk/serialization.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace polywalk;

namespace {

/// Config files may be JSON objects (nested objects address subcommands) or TOML.
class JsonOrTomlConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream toml(text);
      return CLI::ConfigTOML::from_config(toml);
    }
    std::vector<CLI::ConfigItem> items;
    flatten(Json::parse(text), {}, items);
    return items;
  }

 private:
  static std::string scalar(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

  static void flatten(const Json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        flatten(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(std::stod(s));
  return out;
}

GridFilter parse_filters(const std::vector<std::string>& filters) {
  GridFilter f;
  for (const auto& entry : filters) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--filter", "expected key=value, got '" + entry + "'");
    const std::string key = entry.substr(0, eq);
    const auto values = split_list(entry.substr(eq + 1));
    if (key == "density") {
      f.densities.insert(f.densities.end(), values.begin(), values.end());
    } else if (key == "log10_sigma" || key == "ls") {
      for (double v : to_doubles(values)) f.log10_sigmas.push_back(v);
    } else if (key == "sigma") {
      for (double v : to_doubles(values)) f.log10_sigmas.push_back(std::log10(v));
    } else if (key == "polytope") {
      f.polytopes.insert(f.polytopes.end(), values.begin(), values.end());
    } else if (key == "theta") {
      for (double v : to_doubles(values)) f.thetas.push_back(v);
    } else if (key == "d") {
      for (const auto& v : values) f.dims.push_back(std::stol(v));
    } else {
      throw CLI::ValidationError("--filter", "unknown key '" + key + "'");
    }
  }
  return f;
}

fs::path truth_path(const fs::path& dir, const ProblemSpec& spec) { return dir / (spec.id() + ".json"); }

struct RunOptions {
  std::size_t n_kept = 0;
  std::size_t thin = 0;
  bool thin_set = false;
  std::size_t burn_in = 0;
  std::size_t chains = 0;
  std::string metric;
  double fixed_delta = 1e-6;
  std::string step_distribution = "half_normal";
  std::string moment = "second";
  bool paper_scale = false;

  void add_to(CLI::App& app) {
    app.add_option("--n-kept", n_kept, "Retained samples per chain");
    app.add_option("--thin", thin, "Thinning interval (default: d)")->each([this](const std::string&) { thin_set = true; });
    app.add_option("--burn-in", burn_in, "Discarded initial steps");
    app.add_option("--metric", metric, "hessian|sq_hessian|sc_sq_hessian|barrier|identity");
    app.add_option("--fixed-delta", fixed_delta, "Metric shift under the epsilon parametrization");
    app.add_option("--step-dist", step_distribution, "half_normal|chi");
    app.add_option("--moment", moment, "Moment used to match the half-normal: second|first");
    app.add_flag("--paper-scale", paper_scale, "Use paper-scale chain lengths");
  }

  RunConfig config() const {
    RunConfig cfg = paper_scale ? RunConfig::paper_scale() : RunConfig{};
    if (n_kept > 0) cfg.n_kept = n_kept;
    if (thin_set) cfg.thin = thin;
    cfg.burn_in = burn_in;
    if (chains > 0) cfg.n_chains = chains;
    cfg.metric = metric;
    cfg.fixed_delta = fixed_delta;
    cfg.step_distribution = step_distribution;
    if (moment == "first") {
      cfg.moment = MomentMatch::first;
    } else if (moment != "second") {
      throw CLI::ValidationError("--moment", "expected first or second");
    }
    return cfg;
  }
};

Json run_config_json(const RunConfig& cfg) {
  return {{"n_kept", cfg.n_kept},          {"thin", cfg.thin},
          {"burn_in", cfg.burn_in},        {"n_chains", cfg.n_chains},
          {"seed", cfg.seed},              {"metric", cfg.metric},
          {"fixed_delta", cfg.fixed_delta}, {"step_distribution", cfg.step_distribution},
          {"moment", cfg.moment == MomentMatch::first ? "first" : "second"}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hit-and-Run and MCMC benchmark on constrained polytopes"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonOrTomlConfig>());
  app.set_config("--config", "", "JSON or TOML file with option values");
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (overrides POLYWALK_THREADS)");

  // grid
  auto* grid = app.add_subcommand("grid", "Write the problem manifest");
  std::vector<std::string> filters;
  std::string grid_out = "manifest.json";
  grid->add_option("--filter", filters, "Axis restriction key=v1,v2 (density, ls, sigma, polytope, theta, d)");
  grid->add_option("--out", grid_out, "Manifest file");

  // ground-truth
  auto* gt = app.add_subcommand("ground-truth", "Long Hit-and-Run runs binned into reference histograms");
  std::string gt_manifest, gt_out;
  bool gt_paper = false, gt_skip = false;
  GroundTruthConfig gt_cfg;
  std::size_t gt_base = 0;
  gt->add_option("--manifest", gt_manifest, "Manifest file")->required();
  gt->add_option("--out", gt_out, "Output directory")->required();
  gt->add_flag("--paper-scale", gt_paper, "1e6·d·log2(d) steps per chain, ten times that for Gaussians");
  gt->add_option("--gaussian-factor", gt_cfg.gaussian_length_factor, "Length multiplier for Gaussian targets");
  gt->add_option("--base-len", gt_base, "Steps per chain are base_len·d·log2(d)");
  bool gt_fixed_range = false;
  gt->add_flag("--fixed-range", gt_fixed_range, "Bin over [0,1]^2 instead of a range fitted to a pilot run");
  gt->add_option("--range-quantile", gt_cfg.range_quantile, "Tail mass left outside the fitted range, per side");
  gt->add_option("--bins", gt_cfg.grid.nx, "Bins per axis")->each([&](const std::string&) { gt_cfg.grid.ny = gt_cfg.grid.nx; });
  gt->add_option("--chains", gt_cfg.n_chains, "Chains per problem");
  gt->add_option("--seed", gt_cfg.seed, "Base seed");
  gt->add_flag("--skip-existing", gt_skip, "Keep histograms that already exist");

  // sample
  auto* sample = app.add_subcommand("sample", "Run one chain and write its samples");
  std::string problem_id, sampler_name, sample_out, format;
  double step = 1.0;
  std::uint64_t seed = 0;
  RunOptions sample_opts;
  sample->add_option("--problem", problem_id, "Problem id, e.g. gauss_iso_mu0.5_cone19_d4_ls-1.5")->required();
  sample->add_option("--sampler", sampler_name, "Sampler name")->required();
  sample->add_option("--step", step, "Step parameter")->required();
  sample->add_option("--seed", seed, "Seed");
  sample->add_option("--out", sample_out, "Output file")->required();
  sample->add_option("--format", format, "csv|bin (default from the extension)")->check(CLI::IsMember({"csv", "bin"}));
  sample_opts.add_to(*sample);

  // bench
  auto* bench = app.add_subcommand("bench", "Step-size grid search per problem and sampler");
  std::string bench_manifest, bench_samplers, bench_gt, bench_out, bench_steps, bench_all;
  std::size_t replicates = 1;
  std::uint64_t bench_seed = 0;
  bool select_once = false;
  RunOptions bench_opts;
  bench->add_option("--manifest", bench_manifest, "Manifest file")->required();
  bench->add_option("--samplers", bench_samplers, "Comma-separated sampler names")->required();
  bench->add_option("--gt", bench_gt, "Ground-truth directory")->required();
  bench->add_option("--out", bench_out, "results.csv")->required();
  bench->add_option("--steps", bench_steps, "Comma-separated step grid (default: 13 values over [1e-2, 1e1])");
  bench->add_option("--replicates", replicates, "Independent seeds per problem and sampler");
  bench->add_option("--seed", bench_seed, "Base seed; replicate r uses seed + 1000·r");
  bench->add_option("--chains", bench_opts.chains, "Chains per run");
  bench->add_flag("--select-once", select_once, "Search the grid with the first replicate only");
  bench->add_option("--all-runs", bench_all, "Also write every grid point to this CSV");
  bench_opts.add_to(*bench);

  // report
  auto* report = app.add_subcommand("report", "Aggregate results into tables");
  std::string report_results, report_out;
  report->add_option("--results", report_results, "results.csv")->required();
  report->add_option("--out", report_out, "Output directory")->required();

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "ESS, split R-hat and L1 of sample files");
  std::vector<std::string> diag_samples;
  std::string diag_gt;
  diagnose->add_option("--samples", diag_samples, "Sample files, one chain each")->required();
  diagnose->add_option("--gt", diag_gt, "Ground-truth histogram")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) setenv("POLYWALK_THREADS", std::to_string(threads).c_str(), 1);

    if (grid->parsed()) {
      const auto specs = problem_grid(parse_filters(filters));
      if (specs.empty()) std::cerr << "warning: the filter selects no problems\n";
      write_json(grid_out, manifest_to_json(specs));
      std::cout << specs.size() << " problems written to " << grid_out << '\n';
    } else if (gt->parsed()) {
      if (gt_paper) {
        gt_cfg.base_len = GroundTruthConfig::paper_scale().base_len;
        if (gt->count("--gaussian-factor") == 0) {
          gt_cfg.gaussian_length_factor = GroundTruthConfig::paper_scale().gaussian_length_factor;
        }
      }
      if (gt_base > 0) gt_cfg.base_len = gt_base;
      gt_cfg.adaptive_range = !gt_fixed_range;
      const auto specs = specs_from_manifest(read_json(gt_manifest));
      for (const auto& spec : specs) {
        const auto path = truth_path(gt_out, spec);
        if (gt_skip && fs::exists(path)) continue;
        const auto h = ground_truth(spec, gt_cfg);
        Json j = histogram_to_json(h);
        j["problem_id"] = spec.id();
        j["steps_per_chain"] = ground_truth_steps(gt_cfg, spec);
        j["chains"] = gt_cfg.n_chains;
        j["seed"] = gt_cfg.seed;
        write_json(path, j);
        std::cout << spec.id() << '\n';
      }
    } else if (sample->parsed()) {
      const auto spec = ProblemSpec::parse_id(problem_id);
      const auto problem = build_problem(spec);
      RunConfig cfg = sample_opts.config();
      cfg.seed = seed;
      const auto kernel = make_problem_kernel(problem, parse_sampler(sampler_name), step, cfg);
      ChainConfig chain_cfg;
      chain_cfg.n_kept = cfg.n_kept;
      chain_cfg.thin = cfg.thin == 0 ? static_cast<std::size_t>(spec.d) : cfg.thin;
      chain_cfg.burn_in = cfg.burn_in;
      chain_cfg.seed = seed;
      const auto result = run_chain(*kernel, *problem.target, *problem.polytope, problem.x0, chain_cfg);
      if (format.empty()) format = fs::path(sample_out).extension() == ".csv" ? "csv" : "bin";
      Json meta = {{"problem_id", spec.id()},
                   {"sampler", to_string(kernel->id())},
                   {"step", step},
                   {"seed", seed},
                   {"config", run_config_json(cfg)},
                   {"stats", chain_stats_to_json(result.stats)}};
      if (format == "csv") {
        write_samples_csv(sample_out, result.samples);
        write_samples_meta(sample_out, result.samples, meta);
      } else {
        write_samples_bin(sample_out, result.samples, meta);
      }
      std::cout << meta.dump(2) << '\n';
    } else if (bench->parsed()) {
      RunConfig cfg = bench_opts.config();
      const auto specs = specs_from_manifest(read_json(bench_manifest));
      const auto steps = bench_steps.empty() ? default_step_grid() : to_doubles(split_list(bench_steps));
      std::vector<RunRecord> best, all;
      for (const auto& spec : specs) {
        const auto truth = histogram_from_json(read_json(truth_path(bench_gt, spec)));
        const auto problem = build_problem(spec);
        for (const auto& name : split_list(bench_samplers)) {
          const auto sampler = parse_sampler(name);
          double chosen = 0.0;
          for (std::size_t r = 0; r < replicates; ++r) {
            RunConfig local = cfg;
            local.seed = bench_seed + 1000 * r;
            RunRecord record;
            if (select_once && r > 0) {
              record = evaluate_run(problem, sampler, chosen, local, truth);
              all.push_back(record);
            } else {
              auto search = grid_search(problem, sampler, steps, local, truth);
              record = search.best;
              chosen = record.step;
              all.insert(all.end(), search.runs.begin(), search.runs.end());
            }
            best.push_back(record);
            std::cout << record.problem_id << ' ' << record.sampler << " step=" << record.step
                      << " l1=" << record.l1 << " min_ess=" << record.min_ess << '\n';
          }
        }
      }
      write_results_csv(bench_out, best);
      if (!bench_all.empty()) write_results_csv(bench_all, all);
    } else if (report->parsed()) {
      const auto result = aggregate(read_results_csv(report_results));
      write_report(report_out, result);
      std::cout << "sampler,group,theta,mean_l1,count\n";
      for (const auto& c : result.l1_table) {
        std::cout << c.sampler << ',' << c.group << ',' << c.theta << ',' << c.mean_l1 << ',' << c.count << '\n';
      }
    } else if (diagnose->parsed()) {
      const auto truth = histogram_from_json(read_json(diag_gt));
      std::vector<Matrix> chains;
      RunRecord record;
      std::size_t steps = 0, accepted = 0;
      for (const auto& file : diag_samples) {
        chains.push_back(read_samples(file));
        const fs::path sidecar(file + ".json");
        if (fs::exists(sidecar)) {
          const auto meta = read_json(sidecar);
          if (meta.contains("stats")) {
            const auto& s = meta.at("stats");
            record.wall_time_s += s.value("wall_time_s", 0.0);
            steps += s.value("steps", std::size_t{0});
            accepted += s.value("accepted", std::size_t{0});
            record.degenerate_events += s.value("degenerate_chords", std::uint64_t{0});
          }
        }
      }
      record.min_ess = min_marginal_ess(chains);
      record.min_ess_per_sec = record.wall_time_s > 0.0 ? record.min_ess / record.wall_time_s : 0.0;
      record.rhat_max = max_split_rhat(chains);
      record.l1 = l1_error(hist2d(chains, truth.dim_x, truth.dim_y, truth.grid), truth);
      record.accept_rate = steps > 0 ? static_cast<double>(accepted) / static_cast<double>(steps) : 0.0;
      std::cout << diagnostics_report(record).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
