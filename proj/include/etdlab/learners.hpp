#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "etdlab/tile_coding.hpp"

namespace etdlab::learners {

inline constexpr double kDefaultDivergenceThreshold = 1e6;

/// Weights plus the emphatic and eligibility carry-state of one run.
struct LearnerState {
  std::vector<double> theta;
  /// Followon trace of the most recent update (0 before the first step of an episode).
  double followon = 0.0;
  /// Importance ratio of the most recent update (0 before the first step of an episode).
  double rho_prev = 0.0;
  /// Eligibility trace, used by tdlambda_update only.
  std::vector<double> trace;
  double alpha = 0.0;
  double divergence_threshold = kDefaultDivergenceThreshold;
  /// Latched the first time a weight becomes non-finite or exceeds the threshold.
  bool diverged = false;
};

/// Zero weights and traces. Throws ConfigError unless alpha > 0.
LearnerState make_learner(std::size_t dimension, double alpha,
                          double divergence_threshold = kDefaultDivergenceThreshold);

/// Episode boundary: the next etd0_update uses F = 1 and the trace restarts at 0.
void begin_episode(LearnerState& st) noexcept;

/// One transition for the one-step learners. phi_next is empty at termination.
struct SampleStep {
  const features::SparseFeatures& phi;
  double reward;
  const features::SparseFeatures& phi_next;
  double rho = 1.0;
};

/// One transition for TD(lambda) on dense features.
/// lambda and gamma_trace belong to S_t (they decay the trace on arrival);
/// gamma_next is the discount applied to the bootstrap from S_{t+1}.
struct TraceStep {
  std::span<const double> phi;
  double reward;
  std::span<const double> phi_next;
  double lambda;
  double gamma_trace;
  double gamma_next;
};

enum class UpdateStatus { Ok, Diverged };

/// theta += alpha * rho * delta * phi, delta = R + theta^T phi' - theta^T phi.
UpdateStatus td0_update(LearnerState& st, const SampleStep& x);

/// F = rho_prev * F_prev + 1, then theta += alpha * rho * F * delta * phi.
UpdateStatus etd0_update(LearnerState& st, const SampleStep& x);

/// Accumulating trace with state-dependent lambda:
/// e = gamma_trace * lambda * e + phi; theta += alpha * delta * e,
/// delta = R + gamma_next * theta^T phi' - theta^T phi.
UpdateStatus tdlambda_update(LearnerState& st, const TraceStep& x);

/// theta^T phi.
[[nodiscard]] inline double predict(std::span<const double> theta, const features::SparseFeatures& phi) {
  return features::dot(theta, phi);
}

}  // namespace etdlab::learners
