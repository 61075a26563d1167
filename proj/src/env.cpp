#include "etdlab/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "etdlab/errors.hpp"

namespace etdlab::env {

bool in_bounds(const CarState& s) noexcept {
  return s.position >= kPositionMin && s.position <= kPositionMax && s.velocity >= kVelocityMin &&
         s.velocity <= kVelocityMax;
}

CarState mc_reset(Rng& rng) { return mc_reset_at(rng.uniform()); }

CarState mc_reset_at(double u) noexcept {
  return {kResetLow + (kResetHigh - kResetLow) * u, 0.0};
}

Transition mc_step(const CarState& s, Action a) noexcept {
  double v = s.velocity + kThrottleGain * throttle(a) - kGravityGain * std::cos(3.0 * s.position);
  v = std::clamp(v, kVelocityMin, kVelocityMax);
  double p = s.position + v;
  if (p < kPositionMin) {
    p = kPositionMin;
    v = 0.0;
  }
  p = std::min(p, kPositionMax);
  return {-1.0, {p, v}, p >= kGoalPosition};
}

ChainState chain_step(ChainState s, const Matrix& transition, Rng& rng) {
  if (!transition.square() || s.index >= transition.rows())
    throw ConfigError("chain_step: state " + std::to_string(s.index) + " outside transition matrix");
  const auto row = transition.row(s.index);
  double total = 0.0;
  for (double p : row) {
    if (p < 0.0) throw ConfigError("chain_step: negative transition probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError("chain_step: row " + std::to_string(s.index) + " is not stochastic");

  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= 0.0) continue;
    last_positive = j;
    cumulative += row[j];
    if (u < cumulative) return {j};
  }
  return {last_positive};
}

ChainState chain_start(std::size_t num_states, Rng& rng) { return {rng.below(num_states)}; }

}  // namespace etdlab::env
