#pragma once

#include <cstdint>
#include <string>

namespace polywalk {

/// One (problem, sampler, step, seed) benchmark result. Row contract of results.csv.
struct RunRecord {
  std::string problem_id;
  std::string sampler;
  /// "epsilon" or "delta".
  std::string param_kind = "epsilon";
  double step = 0.0;
  std::uint64_t seed = 0;
  double min_ess = 0.0;
  double min_ess_per_sec = 0.0;
  double l1 = 0.0;
  /// +inf for chains without within-chain variance.
  double rhat_max = 0.0;
  double accept_rate = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t degenerate_events = 0;
};

}  // namespace polywalk
