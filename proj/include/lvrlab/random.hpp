#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace lvrlab {

// Reproducible standard-normal draws for one Monte-Carlo path.
//
// Each (seed, path_index) pair re-seeds its own 64-bit Mersenne twister
// through std::seed_seq, so path streams never share state and a path's draws
// do not depend on which worker produces them or in what order. Both the
// engine and seed_seq are fully specified by the standard; the normal
// transform (Box-Muller on 53-bit uniforms) is done here rather than through
// std::normal_distribution, whose algorithm is implementation-defined.
class NormalStream {
public:
  NormalStream(std::uint64_t seed, std::uint64_t path_index) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(path_index >> 32),
        0x6c767231u};
    engine_.seed(seq);
  }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline NormalStream normal_stream(std::uint64_t seed, std::uint64_t path_index) {
  return NormalStream(seed, path_index);
}

}  // namespace lvrlab
