#include "etdlab/chain_sim.hpp"

#include <algorithm>

#include "etdlab/env.hpp"
#include "etdlab/errors.hpp"
#include "etdlab/rng.hpp"

namespace etdlab::learners {

ChainRunResult simulate_chain_tdlambda(const stability::FiniteMRP& mrp, double alpha,
                                       std::span<const double> theta0, std::size_t max_steps,
                                       std::uint64_t seed, double divergence_threshold) {
  stability::validate(mrp);
  if (theta0.size() != mrp.num_features()) throw ContractError("theta0 dimension != feature count");

  LearnerState st = make_learner(mrp.num_features(), alpha, divergence_threshold);
  std::copy(theta0.begin(), theta0.end(), st.theta.begin());

  Rng rng(seed);
  env::ChainState s = env::chain_start(mrp.num_states(), rng);
  ChainRunResult out;
  for (; out.steps < max_steps; ++out.steps) {
    const env::ChainState next = env::chain_step(s, mrp.transition, rng);
    const TraceStep step{mrp.features.row(s.index), 0.0, mrp.features.row(next.index),
                         mrp.lambda[s.index], mrp.gamma[s.index], mrp.gamma[next.index]};
    if (tdlambda_update(st, step) == UpdateStatus::Diverged) {
      out.diverged = true;
      ++out.steps;
      break;
    }
    s = next;
  }
  out.final_norm = max_abs(st.theta);
  return out;
}

}  // namespace etdlab::learners
