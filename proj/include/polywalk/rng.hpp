#pragma once

#include "polywalk/geometry.hpp"

#include <cstdint>
#include <random>

namespace polywalk {

/// Per-chain random stream. Seeded from a 64-bit seed; not shared between chains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  double normal() { return normal_(engine_); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  Vector normal_vector(Index d);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace polywalk
