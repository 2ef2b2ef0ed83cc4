#pragma once

#include "polywalk/bench.hpp"
#include "polywalk/chain.hpp"
#include "polywalk/diagnostics.hpp"
#include "polywalk/geometry.hpp"
#include "polywalk/records.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace polywalk {

using Json = nlohmann::json;

/// Finite values as numbers, non-finite ones as the strings "inf", "-inf" or "nan".
Json number_to_json(double value);
double number_from_json(const Json& j);

/// {"A": [[...]], "b": [...]}
Json polytope_to_json(const Polytope& P);
Polytope polytope_from_json(const Json& j);

/// {"kind", "d", "sigma", "mu"}
Json target_spec_to_json(const ProblemSpec& spec);

/// One manifest entry: id, grid coordinates, target spec and the polytope.
Json manifest_entry(const ProblemSpec& spec);
ProblemSpec spec_from_manifest_entry(const Json& j);
Json manifest_to_json(const std::vector<ProblemSpec>& specs);
std::vector<ProblemSpec> specs_from_manifest(const Json& j);

Json histogram_to_json(const Histogram2D& h);
Histogram2D histogram_from_json(const Json& j);

Json chain_stats_to_json(const ChainStats& stats);
/// {min_ess, min_ess_per_sec, rhat_max, l1, acceptance_rate, degenerate_events}
Json diagnostics_report(const RunRecord& record);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

extern const std::vector<std::string> kResultColumns;
void write_results_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_results_csv(const std::filesystem::path& path);

/// CSV with a header row x1,…,xd.
void write_samples_csv(const std::filesystem::path& path, const Matrix& samples);
Matrix read_samples_csv(const std::filesystem::path& path);
/// Raw column-major float64 in `path` plus `path`.json holding rows, cols and `meta`.
void write_samples_bin(const std::filesystem::path& path, const Matrix& samples, const Json& meta);
Matrix read_samples_bin(const std::filesystem::path& path);
/// Sidecar `path`.json for a CSV sample file (layout "csv").
void write_samples_meta(const std::filesystem::path& path, const Matrix& samples, const Json& meta);
/// Binary when a .json sidecar exists and does not declare the csv layout, CSV otherwise.
Matrix read_samples(const std::filesystem::path& path);

/// Writes l1_table.csv, rel_perf.csv, per_problem.csv and report.json into `dir`.
void write_report(const std::filesystem::path& dir, const Report& report);

}  // namespace polywalk
