#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ringchaos {

// Derive an independent seed for a named consumer. Streams with different
// names (or indices) never share state, so adding a consumer leaves the
// others untouched.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0) noexcept;

// Thin wrapper over mt19937_64 with platform-independent variate generation
// (the std:: distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0)
      : engine_(derive_seed(seed, stream, index)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1), 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

  // Standard normal via the polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ringchaos
