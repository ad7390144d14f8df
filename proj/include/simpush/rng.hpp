#pragma once

#include <cstdint>

namespace simpush {

// SplitMix64: counter-based, trivially splittable, one 64-bit word of state.
// Substreams are derived by hashing (seed, stream id), which keeps results
// independent of how work is partitioned across threads.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, bound); bound > 0.
  std::uint32_t below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

  // Deterministic substream seed for (seed, stream).
  static std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 h(seed ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
    return h();
  }

 private:
  std::uint64_t state_;
};

}  // namespace simpush
