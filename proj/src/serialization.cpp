#include "polywalk/serialization.hpp"

#include "polywalk/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace polywalk {

namespace fs = std::filesystem;

namespace {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double value = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("malformed number '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

fs::path sidecar_path(const fs::path& path) { return fs::path(path.string() + ".json"); }

}  // namespace

Json number_to_json(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("expected a number, got " + j.dump());
}

Json polytope_to_json(const Polytope& P) {
  Json A = Json::array();
  for (Index i = 0; i < P.num_constraints(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < P.dim(); ++j) row.push_back(P.A()(i, j));
    A.push_back(std::move(row));
  }
  Json b = Json::array();
  for (Index i = 0; i < P.num_constraints(); ++i) b.push_back(P.b()[i]);
  return {{"A", std::move(A)}, {"b", std::move(b)}};
}

Polytope polytope_from_json(const Json& j) {
  const auto& rows = j.at("A");
  const auto& rhs = j.at("b");
  if (!rows.is_array() || !rhs.is_array() || rows.empty()) throw std::invalid_argument("polytope JSON needs A and b");
  const auto m = static_cast<Index>(rows.size());
  const auto d = static_cast<Index>(rows.front().size());
  Matrix A(m, d);
  for (Index i = 0; i < m; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != d) throw DimensionError("polytope JSON: ragged A");
    for (Index k = 0; k < d; ++k) A(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  Vector b(static_cast<Index>(rhs.size()));
  for (Index i = 0; i < b.size(); ++i) b[i] = rhs.at(static_cast<std::size_t>(i)).get<double>();
  return Polytope(std::move(A), std::move(b));
}

Json target_spec_to_json(const ProblemSpec& spec) {
  return {{"kind", to_string(spec.density)}, {"d", spec.d}, {"sigma", spec.sigma()}, {"mu", spec.mu}};
}

Json manifest_entry(const ProblemSpec& spec) {
  const Problem problem = build_problem(spec);
  return {{"id", spec.id()},
          {"density", spec.density_label()},
          {"log10_sigma", spec.log10_sigma},
          {"polytope_kind", to_string(spec.polytope)},
          {"theta", spec.theta_open},
          {"target", target_spec_to_json(spec)},
          {"polytope", polytope_to_json(*problem.polytope)}};
}

ProblemSpec spec_from_manifest_entry(const Json& j) {
  if (j.is_string()) return ProblemSpec::parse_id(j.get<std::string>());
  ProblemSpec spec = ProblemSpec::parse_id(j.at("id").get<std::string>());
  if (j.contains("target")) {
    const auto& t = j.at("target");
    if (t.at("kind").get<std::string>() != to_string(spec.density) || t.at("d").get<Index>() != spec.d) {
      throw std::invalid_argument("manifest entry " + spec.id() + ": target does not match id");
    }
  }
  return spec;
}

Json manifest_to_json(const std::vector<ProblemSpec>& specs) {
  Json problems = Json::array();
  for (const auto& spec : specs) problems.push_back(manifest_entry(spec));
  return {{"problems", std::move(problems)}};
}

std::vector<ProblemSpec> specs_from_manifest(const Json& j) {
  const Json& list = j.is_array() ? j : j.at("problems");
  std::vector<ProblemSpec> specs;
  for (const auto& entry : list) specs.push_back(spec_from_manifest_entry(entry));
  return specs;
}

Json histogram_to_json(const Histogram2D& h) {
  const auto& g = h.grid;
  return {{"grid", {{"x_lo", g.x_lo}, {"x_hi", g.x_hi}, {"y_lo", g.y_lo}, {"y_hi", g.y_hi}, {"nx", g.nx}, {"ny", g.ny}}},
          {"dims", {h.dim_x, h.dim_y}},
          {"counts", h.counts},
          {"total", h.total},
          {"clamped", h.clamped}};
}

Histogram2D histogram_from_json(const Json& j) {
  const auto& g = j.at("grid");
  HistogramGrid grid;
  grid.x_lo = g.at("x_lo").get<double>();
  grid.x_hi = g.at("x_hi").get<double>();
  grid.y_lo = g.at("y_lo").get<double>();
  grid.y_hi = g.at("y_hi").get<double>();
  grid.nx = g.at("nx").get<int>();
  grid.ny = g.at("ny").get<int>();
  Histogram2D h = empty_histogram(grid, j.at("dims").at(0).get<Index>(), j.at("dims").at(1).get<Index>());
  auto counts = j.at("counts").get<std::vector<double>>();
  if (counts.size() != h.counts.size()) throw std::invalid_argument("histogram JSON: count vector has the wrong size");
  h.counts = std::move(counts);
  h.total = j.at("total").get<double>();
  h.clamped = j.value("clamped", std::size_t{0});
  return h;
}

Json chain_stats_to_json(const ChainStats& s) {
  return {{"steps", s.steps},
          {"accepted", s.accepted},
          {"acceptance_rate", s.acceptance_rate()},
          {"infeasible_proposals", s.infeasible_proposals},
          {"degenerate_chords", s.degenerate_chords},
          {"reverse_failures", s.reverse_failures},
          {"diagonal_fallbacks", s.diagonal_fallbacks},
          {"isotropic_fallbacks", s.isotropic_fallbacks},
          {"wall_time_s", s.wall_time_s}};
}

Json diagnostics_report(const RunRecord& r) {
  return {{"min_ess", number_to_json(r.min_ess)},
          {"min_ess_per_sec", number_to_json(r.min_ess_per_sec)},
          {"rhat_max", number_to_json(r.rhat_max)},
          {"l1", number_to_json(r.l1)},
          {"acceptance_rate", number_to_json(r.accept_rate)},
          {"degenerate_events", r.degenerate_events}};
}

Json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

const std::vector<std::string> kResultColumns = {"problem_id", "sampler", "param_kind", "step",
                                                 "seed",       "min_ess", "min_ess_per_sec", "l1",
                                                 "rhat_max",   "accept_rate", "wall_time_s"};

void write_results_csv(const fs::path& path, const std::vector<RunRecord>& records) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < kResultColumns.size(); ++i) out << (i ? "," : "") << kResultColumns[i];
  out << '\n';
  for (const auto& r : records) {
    out << r.problem_id << ',' << r.sampler << ',' << r.param_kind << ',' << format_double(r.step) << ',' << r.seed
        << ',' << format_double(r.min_ess) << ',' << format_double(r.min_ess_per_sec) << ',' << format_double(r.l1)
        << ',' << format_double(r.rhat_max) << ',' << format_double(r.accept_rate) << ','
        << format_double(r.wall_time_s) << '\n';
  }
}

std::vector<RunRecord> read_results_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty results file");
  const auto header = split(strip_cr(line), ',');
  std::vector<int> column(kResultColumns.size(), -1);
  for (std::size_t k = 0; k < kResultColumns.size(); ++k) {
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == kResultColumns[k]) column[k] = static_cast<int>(h);
    }
    if (column[k] < 0) throw std::invalid_argument(path.string() + ": missing column " + kResultColumns[k]);
  }
  std::vector<RunRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": wrong field count");
    }
    auto f = [&](std::size_t k) -> const std::string& { return fields[static_cast<std::size_t>(column[k])]; };
    RunRecord r;
    r.problem_id = f(0);
    r.sampler = f(1);
    r.param_kind = f(2);
    r.step = parse_double(f(3));
    r.seed = std::stoull(f(4));
    r.min_ess = parse_double(f(5));
    r.min_ess_per_sec = parse_double(f(6));
    r.l1 = parse_double(f(7));
    r.rhat_max = parse_double(f(8));
    r.accept_rate = parse_double(f(9));
    r.wall_time_s = parse_double(f(10));
    records.push_back(std::move(r));
  }
  return records;
}

void write_samples_csv(const fs::path& path, const Matrix& samples) {
  auto out = open_out(path);
  for (Index j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n';
  for (Index i = 0; i < samples.rows(); ++i) {
    for (Index j = 0; j < samples.cols(); ++j) out << (j ? "," : "") << format_double(samples(i, j));
    out << '\n';
  }
}

Matrix read_samples_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty sample file");
  const auto cols = split(strip_cr(line), ',').size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != cols) throw DimensionError(path.string() + ": ragged sample row");
    for (const auto& field : fields) values.push_back(parse_double(field));
    ++rows;
  }
  Matrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = values[i * cols + j];
  }
  return out;
}

void write_samples_bin(const fs::path& path, const Matrix& samples, const Json& meta) {
  {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(reinterpret_cast<const char*>(samples.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(samples.size())));
  }
  Json sidecar = meta;
  sidecar["rows"] = samples.rows();
  sidecar["cols"] = samples.cols();
  sidecar["layout"] = "column-major float64";
  write_json(sidecar_path(path), sidecar);
}

Matrix read_samples_bin(const fs::path& path) {
  const Json sidecar = read_json(sidecar_path(path));
  const auto rows = sidecar.at("rows").get<Index>();
  const auto cols = sidecar.at("cols").get<Index>();
  const auto expected = sizeof(double) * static_cast<std::size_t>(rows * cols);
  if (fs::file_size(path) != expected) throw DimensionError(path.string() + ": size does not match sidecar");
  Matrix out(rows, cols);
  auto in = open_in(path, std::ios::in | std::ios::binary);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(expected));
  return out;
}

void write_samples_meta(const fs::path& path, const Matrix& samples, const Json& meta) {
  Json sidecar = meta;
  sidecar["rows"] = samples.rows();
  sidecar["cols"] = samples.cols();
  sidecar["layout"] = "csv";
  write_json(sidecar_path(path), sidecar);
}

Matrix read_samples(const fs::path& path) {
  const auto sidecar = sidecar_path(path);
  if (fs::exists(sidecar) && read_json(sidecar).value("layout", std::string()) != "csv") return read_samples_bin(path);
  return read_samples_csv(path);
}

void write_report(const fs::path& dir, const Report& report) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "l1_table.csv");
    out << "sampler,group,theta,mean_l1,count\n";
    for (const auto& c : report.l1_table) {
      out << c.sampler << ',' << c.group << ',' << format_double(c.theta) << ',' << format_double(c.mean_l1) << ','
          << c.count << '\n';
    }
  }
  {
    auto out = open_out(dir / "rel_perf.csv");
    out << "sampler,axis,value,mean_rel_perf,count\n";
    for (const auto& c : report.rel_perf) {
      out << c.sampler << ',' << c.axis << ',' << c.value << ',' << format_double(c.mean_rel_perf) << ',' << c.count
          << '\n';
    }
  }
  {
    auto out = open_out(dir / "per_problem.csv");
    out << "problem_id,sampler,mean_min_ess,rel_perf,replicates\n";
    for (const auto& p : report.per_problem) {
      out << p.problem_id << ',' << p.sampler << ',' << format_double(p.mean_min_ess) << ','
          << format_double(p.rel_perf) << ',' << p.replicates << '\n';
    }
  }
  Json j;
  j["l1_table"] = Json::array();
  for (const auto& c : report.l1_table) {
    j["l1_table"].push_back({{"sampler", c.sampler},
                             {"group", c.group},
                             {"theta", c.theta},
                             {"mean_l1", number_to_json(c.mean_l1)},
                             {"count", c.count}});
  }
  j["rel_perf"] = Json::array();
  for (const auto& c : report.rel_perf) {
    j["rel_perf"].push_back({{"sampler", c.sampler},
                             {"axis", c.axis},
                             {"value", c.value},
                             {"mean_rel_perf", number_to_json(c.mean_rel_perf)},
                             {"count", c.count}});
  }
  j["per_problem"] = Json::array();
  for (const auto& p : report.per_problem) {
    j["per_problem"].push_back({{"problem_id", p.problem_id},
                                {"sampler", p.sampler},
                                {"mean_min_ess", number_to_json(p.mean_min_ess)},
                                {"rel_perf", number_to_json(p.rel_perf)},
                                {"replicates", p.replicates}});
  }
  write_json(dir / "report.json", j);
}

}  // namespace polywalk
