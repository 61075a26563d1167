#pragma once

#include <array>
#include <cstddef>

#include "etdlab/linalg.hpp"
#include "etdlab/rng.hpp"

namespace etdlab::env {

inline constexpr double kPositionMin = -1.2;
inline constexpr double kPositionMax = 0.6;
inline constexpr double kVelocityMin = -0.07;
inline constexpr double kVelocityMax = 0.07;
inline constexpr double kGoalPosition = 0.5;
inline constexpr double kResetLow = -0.6;
inline constexpr double kResetHigh = -0.4;
inline constexpr double kThrottleGain = 0.001;
inline constexpr double kGravityGain = 0.0025;

struct CarState {
  double position = 0.0;
  double velocity = 0.0;

  friend bool operator==(const CarState&, const CarState&) = default;
};

[[nodiscard]] bool in_bounds(const CarState& s) noexcept;

enum class Action : int { Reverse = 0, Coast = 1, Forward = 2 };

inline constexpr std::size_t kNumActions = 3;
inline constexpr std::array<Action, kNumActions> kActions{Action::Reverse, Action::Coast, Action::Forward};

[[nodiscard]] constexpr double throttle(Action a) noexcept {
  return static_cast<double>(static_cast<int>(a) - 1);
}
[[nodiscard]] constexpr std::size_t index(Action a) noexcept { return static_cast<std::size_t>(a); }

struct Transition {
  double reward = -1.0;
  CarState next;
  /// When set, `next` is the goal-crossing state; its value is 0 by convention.
  bool terminal = false;
};

/// Episode start: position uniform in [-0.6, -0.4], velocity 0.
CarState mc_reset(Rng& rng);
/// Start state for a given unit-interval draw u in [0, 1).
[[nodiscard]] CarState mc_reset_at(double u) noexcept;

/// Deterministic Mountain Car dynamics. Velocity is updated and clipped
/// first, then position; hitting the left wall zeroes the velocity.
[[nodiscard]] Transition mc_step(const CarState& s, Action a) noexcept;

struct ChainState {
  std::size_t index = 0;
  friend bool operator==(const ChainState&, const ChainState&) = default;
};

/// Samples the successor of `s` from row s of the row-stochastic matrix P.
/// Throws ConfigError if that row is not stochastic within 1e-12.
ChainState chain_step(ChainState s, const Matrix& transition, Rng& rng);

/// Uniform initial chain state.
ChainState chain_start(std::size_t num_states, Rng& rng);

}  // namespace etdlab::env
