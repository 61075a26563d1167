#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace etdlab {

/// Seeded random source owned by exactly one run.
///
/// Wraps mt19937_64 (whose output sequence is fixed by the standard) and
/// derives doubles and bounded integers itself, so streams are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Independent stream seed for a sub-task (oracle state, chain instance, ...).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return seed ^ index;
}

}  // namespace etdlab
