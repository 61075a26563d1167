#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace etdlab::harness {

enum class Method { Td0, Etd0 };
enum class Mode { OnPolicy, OffPolicy };

[[nodiscard]] const char* to_string(Method m) noexcept;
[[nodiscard]] const char* to_string(Mode m) noexcept;

/// Behavior epsilon in off-policy mode.
inline constexpr double kOffPolicyEpsilon = 0.1;

struct ExperimentConfig {
  Method method = Method::Td0;
  Mode mode = Mode::OnPolicy;
  std::vector<double> alphas;
  std::size_t episodes = 0;
  std::size_t runs = 1;
  std::uint64_t base_seed = 0;
  std::size_t eval_stride = 1;
  std::filesystem::path oracle_path;
  double tail_fraction = 0.01;
  double divergence_threshold = 1e6;
  std::filesystem::path output_dir;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const ExperimentConfig& cfg);

/// `key = value` lines using the ExperimentConfig field names; alphas are
/// comma-separated; '#' starts a comment. Unknown or repeated keys are
/// errors. method, mode, alphas, episodes, runs, oracle_path and output_dir
/// are required. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// The config as `key = value` lines that parse_config accepts.
std::string to_text(const ExperimentConfig& cfg);

/// Seed of run `run` at step-size index `alpha_index`: base + a * 10^6 + r.
[[nodiscard]] constexpr std::uint64_t run_seed(std::uint64_t base_seed, std::size_t alpha_index,
                                               std::size_t run) noexcept {
  return base_seed + static_cast<std::uint64_t>(alpha_index) * 1'000'000ULL + run;
}

}  // namespace etdlab::harness
