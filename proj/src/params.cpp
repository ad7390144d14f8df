#include "simpush/params.hpp"

#include <cmath>
#include <stdexcept>

namespace simpush {

QueryParams derive_params(double c, double eps, double delta, std::uint64_t seed) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("derive_params: c must be in (0,1)");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("derive_params: eps must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("derive_params: delta must be in (0,1)");

  QueryParams p;
  p.c = c;
  p.eps = eps;
  p.delta = delta;
  p.seed = seed;
  p.sqrt_c = std::sqrt(c);
  p.eps_h = (1.0 - p.sqrt_c) / (3.0 * p.sqrt_c) * eps;
  p.max_level = static_cast<int>(std::floor(std::log(1.0 / p.eps_h) /
                                            std::log(1.0 / p.sqrt_c)));
  double walks = 2.0 * std::ceil(std::log(1.0 / ((1.0 - p.sqrt_c) * p.eps_h * delta)) /
                                 (p.eps_h * p.eps_h));
  p.n_walks = walks < 2.0 ? 2 : static_cast<std::uint64_t>(walks);
  p.attention_bound =
      static_cast<std::uint64_t>(std::floor(p.sqrt_c / ((1.0 - p.sqrt_c) * p.eps_h)));
  return p;
}

}  // namespace simpush
