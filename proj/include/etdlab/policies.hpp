#pragma once

#include "etdlab/env.hpp"
#include "etdlab/rng.hpp"

namespace etdlab::policies {

/// Either the fixed target policy or the epsilon-mixture behavior policy:
/// with probability epsilon pick uniformly among all three actions,
/// otherwise follow the target.
class PolicyKind {
 public:
  static PolicyKind target() noexcept { return PolicyKind(false, 0.0); }
  /// Throws ConfigError unless epsilon is in [0, 1].
  static PolicyKind behavior(double epsilon);

  [[nodiscard]] bool is_target() const noexcept { return !mixture_; }
  [[nodiscard]] double epsilon() const noexcept { return epsilon_; }

  friend bool operator==(const PolicyKind&, const PolicyKind&) = default;

 private:
  PolicyKind(bool mixture, double epsilon) noexcept : mixture_(mixture), epsilon_(epsilon) {}
  bool mixture_;
  double epsilon_;
};

/// Push in the direction of the velocity; coast when it is exactly zero.
[[nodiscard]] env::Action target_action(const env::CarState& s) noexcept;

[[nodiscard]] double action_prob(const PolicyKind& kind, const env::CarState& s, env::Action a) noexcept;

env::Action behavior_sample(const PolicyKind& kind, const env::CarState& s, Rng& rng);

/// pi(a|s) / mu(a|s) with pi the target policy. Throws CoverageError if mu(a|s) = 0.
double importance_ratio(const env::CarState& s, env::Action a, const PolicyKind& behavior);

}  // namespace etdlab::policies
