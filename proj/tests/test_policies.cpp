#include <cmath>
#include <set>

#include "doctest.h"
#include "etdlab/errors.hpp"
#include "etdlab/policies.hpp"

using namespace etdlab;
using env::Action;
using policies::PolicyKind;

TEST_CASE("target policy pushes with the velocity") {
  CHECK(policies::target_action({-0.5, 0.01}) == Action::Forward);
  CHECK(policies::target_action({-0.5, -0.01}) == Action::Reverse);
  CHECK(policies::target_action({-0.5, 0.0}) == Action::Coast);
}

TEST_CASE("action probabilities") {
  const env::CarState s{-0.5, 0.01};
  const auto mu = PolicyKind::behavior(0.1);
  CHECK(policies::action_prob(mu, s, Action::Forward) == doctest::Approx(14.0 / 15.0).epsilon(1e-15));
  CHECK(policies::action_prob(mu, s, Action::Coast) == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
  CHECK(policies::action_prob(PolicyKind::target(), s, Action::Reverse) == 0.0);
  CHECK(policies::action_prob(PolicyKind::target(), s, Action::Forward) == 1.0);
}

TEST_CASE("action probabilities sum to one and ratios average to one under the behavior") {
  Rng rng(8);
  for (double eps : {0.0, 0.1, 0.37, 1.0}) {
    for (int i = 0; i < 200; ++i) {
      const env::CarState s{-1.2 + 1.8 * rng.uniform(), i % 10 == 0 ? 0.0 : -0.07 + 0.14 * rng.uniform()};
      for (const auto kind : {PolicyKind::target(), PolicyKind::behavior(eps)}) {
        double total = 0.0;
        for (auto a : env::kActions) total += policies::action_prob(kind, s, a);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      }
      if (eps > 0.0) {
        const auto mu = PolicyKind::behavior(eps);
        double expectation = 0.0;
        for (auto a : env::kActions)
          expectation += policies::action_prob(mu, s, a) * policies::importance_ratio(s, a, mu);
        CHECK(expectation == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("importance ratios") {
  const env::CarState s{-0.3, -0.02};
  const auto mu = PolicyKind::behavior(0.1);
  CHECK(policies::importance_ratio(s, Action::Reverse, mu) == 15.0 / 14.0);
  CHECK(policies::importance_ratio(s, Action::Forward, mu) == 0.0);
  CHECK(policies::importance_ratio(s, Action::Reverse, PolicyKind::target()) == 1.0);
  CHECK_THROWS_AS(policies::importance_ratio(s, Action::Forward, PolicyKind::target()), CoverageError);
}

TEST_CASE("behavior epsilon outside [0, 1] is rejected") {
  CHECK_THROWS_AS(PolicyKind::behavior(-0.1), ConfigError);
  CHECK_THROWS_AS(PolicyKind::behavior(1.5), ConfigError);
}

TEST_CASE("target sampling ignores the rng") {
  Rng rng(1);
  const env::CarState s{-0.5, 0.03};
  for (int i = 0; i < 100; ++i) CHECK(policies::behavior_sample(PolicyKind::target(), s, rng) == Action::Forward);
}

TEST_CASE("behavior sampling frequencies") {
  const env::CarState s{-0.5, 0.03};
  constexpr int kDraws = 100000;

  SUBCASE("epsilon = 1 is uniform") {
    Rng rng(4);
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < kDraws; ++i) ++counts[env::index(policies::behavior_sample(PolicyKind::behavior(1.0), s, rng))];
    const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / kDraws);
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(kDraws) - 1.0 / 3) <= 3 * se);
  }
  SUBCASE("epsilon = 0.1 picks the target action 14/15 of the time") {
    Rng rng(5);
    int hits = 0;
    for (int i = 0; i < kDraws; ++i)
      hits += policies::behavior_sample(PolicyKind::behavior(0.1), s, rng) == Action::Forward ? 1 : 0;
    const double q = 14.0 / 15.0;
    CHECK(std::abs(hits / static_cast<double>(kDraws) - q) <= 3 * std::sqrt(q * (1 - q) / kDraws));
  }
  SUBCASE("same seed, same actions") {
    Rng a(6), b(6);
    for (int i = 0; i < 1000; ++i)
      CHECK(policies::behavior_sample(PolicyKind::behavior(0.1), s, a) ==
            policies::behavior_sample(PolicyKind::behavior(0.1), s, b));
  }
}

TEST_CASE("off-policy ratios take exactly the values 0 and 15/14") {
  Rng rng(10);
  const auto mu = PolicyKind::behavior(0.1);
  std::set<double> seen;
  env::CarState s = env::mc_reset(rng);
  for (int t = 0; t < 20000; ++t) {
    const auto a = policies::behavior_sample(mu, s, rng);
    seen.insert(policies::importance_ratio(s, a, mu));
    const auto tr = env::mc_step(s, a);
    s = tr.terminal ? env::mc_reset(rng) : tr.next;
  }
  CHECK(seen == std::set<double>{0.0, 15.0 / 14.0});
}
