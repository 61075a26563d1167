#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "etdlab/learners.hpp"
#include "etdlab/stability.hpp"

namespace etdlab::learners {

struct ChainRunResult {
  bool diverged = false;
  std::size_t steps = 0;
  double final_norm = 0.0;
};

/// On-policy TD(lambda) with zero rewards along a sampled trajectory of the
/// chain (uniform start state), until the divergence guard trips or
/// max_steps transitions have been processed.
ChainRunResult simulate_chain_tdlambda(const stability::FiniteMRP& mrp, double alpha,
                                       std::span<const double> theta0, std::size_t max_steps,
                                       std::uint64_t seed,
                                       double divergence_threshold = kDefaultDivergenceThreshold);

}  // namespace etdlab::learners
