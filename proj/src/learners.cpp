#include "etdlab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "etdlab/errors.hpp"

namespace etdlab::learners {
namespace {

bool out_of_range(double w, double threshold) { return !std::isfinite(w) || std::abs(w) > threshold; }

void check_dims(const LearnerState& st, const SampleStep& x) {
  if (x.phi.dimension() != st.theta.size() || x.phi_next.dimension() != st.theta.size())
    throw ContractError("learner: feature dimension does not match weight dimension " +
                        std::to_string(st.theta.size()));
}

// Sparse binary update shared by TD(0) and ETD(0); only touched weights can
// have crossed the threshold.
UpdateStatus apply_sparse(LearnerState& st, const features::SparseFeatures& phi, double step) {
  bool bad = !std::isfinite(step);
  for (auto i : phi.active()) {
    st.theta[i] += step;
    bad = bad || out_of_range(st.theta[i], st.divergence_threshold);
  }
  if (bad) st.diverged = true;
  return bad ? UpdateStatus::Diverged : UpdateStatus::Ok;
}

double td_error(const LearnerState& st, const SampleStep& x) {
  return x.reward + features::dot(st.theta, x.phi_next) - features::dot(st.theta, x.phi);
}

}  // namespace

LearnerState make_learner(std::size_t dimension, double alpha, double divergence_threshold) {
  if (!(alpha > 0.0)) throw ConfigError("step size must be positive");
  LearnerState st;
  st.theta.assign(dimension, 0.0);
  st.trace.assign(dimension, 0.0);
  st.alpha = alpha;
  st.divergence_threshold = divergence_threshold;
  return st;
}

void begin_episode(LearnerState& st) noexcept {
  st.followon = 0.0;
  st.rho_prev = 0.0;
  std::fill(st.trace.begin(), st.trace.end(), 0.0);
}

UpdateStatus td0_update(LearnerState& st, const SampleStep& x) {
  check_dims(st, x);
  if (st.diverged) return UpdateStatus::Diverged;
  const double delta = td_error(st, x);
  return apply_sparse(st, x.phi, st.alpha * x.rho * delta);
}

UpdateStatus etd0_update(LearnerState& st, const SampleStep& x) {
  check_dims(st, x);
  if (st.diverged) return UpdateStatus::Diverged;
  const double followon = st.rho_prev * st.followon + 1.0;
  st.followon = followon;
  st.rho_prev = x.rho;
  const double delta = td_error(st, x);
  return apply_sparse(st, x.phi, st.alpha * (x.rho * followon) * delta);
}

UpdateStatus tdlambda_update(LearnerState& st, const TraceStep& x) {
  const std::size_t n = st.theta.size();
  if (x.phi.size() != n || x.phi_next.size() != n || st.trace.size() != n)
    throw ContractError("tdlambda_update: feature dimension does not match weight dimension");
  if (st.diverged) return UpdateStatus::Diverged;

  const double decay = x.gamma_trace * x.lambda;
  double v = 0.0;
  double v_next = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st.trace[i] = decay * st.trace[i] + x.phi[i];
    v += st.theta[i] * x.phi[i];
    v_next += st.theta[i] * x.phi_next[i];
  }
  const double step = st.alpha * (x.reward + x.gamma_next * v_next - v);
  bool bad = !std::isfinite(step);
  for (std::size_t i = 0; i < n; ++i) {
    st.theta[i] += step * st.trace[i];
    bad = bad || out_of_range(st.theta[i], st.divergence_threshold);
  }
  if (bad) st.diverged = true;
  return bad ? UpdateStatus::Diverged : UpdateStatus::Ok;
}

}  // namespace etdlab::learners
