#include "polywalk/rng.hpp"

namespace polywalk {

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() {
  double u = 0.0;
  do {
    u = uniform_(engine_);
  } while (u <= 0.0);
  return u;
}

Vector Rng::normal_vector(Index d) {
  Vector z(d);
  for (Index i = 0; i < d; ++i) z[i] = normal_(engine_);
  return z;
}

}  // namespace polywalk
