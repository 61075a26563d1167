#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "etdlab/env.hpp"
#include "etdlab/execution.hpp"
#include "etdlab/policies.hpp"
#include "etdlab/rng.hpp"
#include "etdlab/tile_coding.hpp"

namespace etdlab::oracle {

inline constexpr std::size_t kRolloutStepCap = 100'000;

struct TrueValueEntry {
  env::CarState state;
  double v_pi = 0.0;
  double mc_stderr = 0.0;
  std::size_t n_rollouts = 0;
  /// Rollouts that hit the step cap (their truncated return is used). Not persisted.
  std::size_t capped_rollouts = 0;

  friend bool operator==(const TrueValueEntry&, const TrueValueEntry&) = default;
};

/// How a table was produced.
struct Provenance {
  std::uint64_t total_steps = 0;
  std::uint64_t sample_size = 0;
  std::uint64_t rollouts = 0;
  std::uint64_t seed = 0;
  /// Behavior epsilon used when collecting states (0 = target policy).
  double epsilon = 0.0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct TrueValueTable {
  std::vector<TrueValueEntry> entries;
  Provenance provenance;

  friend bool operator==(const TrueValueTable&, const TrueValueTable&) = default;
};

/// Runs `behavior` for total_steps steps (restarting on termination) and
/// samples sample_size distinct log positions uniformly from the
/// non-terminal states visited in the second half.
/// Throws ConfigError if sample_size exceeds total_steps / 2.
std::vector<env::CarState> collect_states(std::size_t total_steps, std::size_t sample_size,
                                          const policies::PolicyKind& behavior, Rng& rng);

/// Undiscounted return of one episode; `capped` marks a rollout cut off by the step cap.
struct Rollout {
  double ret = 0.0;
  bool capped = false;
};
using RolloutFn = std::function<Rollout(const env::CarState&, Rng&)>;

/// Target-policy rollout (deterministic; rng unused).
Rollout target_rollout(const env::CarState& start, Rng& rng, std::size_t cap = kRolloutStepCap);

/// Monte-Carlo v_pi per state. State i uses the stream derive_seed(seed, i),
/// so the result does not depend on execution order.
/// Throws ConfigError if rollouts < 2.
TrueValueTable estimate_true_values(std::span<const env::CarState> states, std::size_t rollouts,
                                    std::uint64_t seed, Execution exec = Execution::Parallel);
TrueValueTable estimate_true_values(std::span<const env::CarState> states, std::size_t rollouts,
                                    std::uint64_t seed, const RolloutFn& rollout,
                                    Execution exec = Execution::Parallel);

/// Mean squared value error over the table states. Throws ConfigError on an empty table.
double msve(std::span<const double> theta, const features::TileCoder& coder, const TrueValueTable& table);

/// CSV with a `# steps=..,sample=..,rollouts=..,seed=..,epsilon=..` line, a
/// `position,velocity,v_pi,mc_stderr,n_rollouts` header and 17-digit numbers.
void write_table(std::ostream& out, const TrueValueTable& table);
TrueValueTable read_table(std::istream& in);
void save_table(const TrueValueTable& table, const std::filesystem::path& path);
TrueValueTable load_table(const std::filesystem::path& path);

}  // namespace etdlab::oracle
