#include "etdlab/policies.hpp"

#include "etdlab/errors.hpp"

namespace etdlab::policies {

PolicyKind PolicyKind::behavior(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("behavior epsilon must lie in [0, 1]");
  return PolicyKind(true, epsilon);
}

env::Action target_action(const env::CarState& s) noexcept {
  if (s.velocity > 0.0) return env::Action::Forward;
  if (s.velocity < 0.0) return env::Action::Reverse;
  return env::Action::Coast;
}

double action_prob(const PolicyKind& kind, const env::CarState& s, env::Action a) noexcept {
  const bool greedy = a == target_action(s);
  if (kind.is_target()) return greedy ? 1.0 : 0.0;
  const double eps = kind.epsilon();
  const double explore = eps / static_cast<double>(env::kNumActions);
  return greedy ? (1.0 - eps) + explore : explore;
}

env::Action behavior_sample(const PolicyKind& kind, const env::CarState& s, Rng& rng) {
  if (kind.is_target()) return target_action(s);
  if (rng.uniform() < kind.epsilon()) return env::kActions[rng.below(env::kNumActions)];
  return target_action(s);
}

double importance_ratio(const env::CarState& s, env::Action a, const PolicyKind& behavior) {
  const double mu = action_prob(behavior, s, a);
  if (mu <= 0.0) throw CoverageError("behavior policy never takes this action; ratio undefined");
  return action_prob(PolicyKind::target(), s, a) / mu;
}

}  // namespace etdlab::policies
