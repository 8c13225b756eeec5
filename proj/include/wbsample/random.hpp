#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wbsample {

// Seeded generator with platform-independent bounded draws. The standard
// distributions are implementation-defined, which would break byte-identical
// reruns across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream seed for (seed, tag); tags are typically domain names
// or bucket labels, so parallel scheduling cannot change results.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace wbsample
