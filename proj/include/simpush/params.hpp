#pragma once

#include <cstdint>

namespace simpush {

// Query-time parameters. Everything here is a pure function of
// (c, eps, delta, seed); see derive_params.
struct QueryParams {
  double c = 0.6;
  double eps = 0.02;
  double delta = 1e-4;
  std::uint64_t seed = 0;

  double sqrt_c = 0.0;
  double eps_h = 0.0;              // (1 - sqrt(c)) / (3 sqrt(c)) * eps
  int max_level = 0;               // floor(log_{1/sqrt(c)} (1/eps_h))
  std::uint64_t n_walks = 0;       // 2 * ceil(ln(1/((1-sqrt(c)) eps_h delta)) / eps_h^2)
  std::uint64_t attention_bound = 0;  // floor(sqrt(c) / ((1-sqrt(c)) eps_h))
};

// Throws std::invalid_argument when any of c, eps, delta is outside (0,1).
QueryParams derive_params(double c, double eps, double delta, std::uint64_t seed);

}  // namespace simpush
