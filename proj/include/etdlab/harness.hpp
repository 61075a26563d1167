#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "etdlab/config.hpp"
#include "etdlab/execution.hpp"
#include "etdlab/oracle.hpp"
#include "etdlab/tile_coding.hpp"

namespace etdlab::harness {

/// Oracle states pre-encoded once so per-episode MSVE is a few hundred sparse dots.
class EvalSet {
 public:
  EvalSet(const features::TileCoder& coder, const oracle::TrueValueTable& table);

  [[nodiscard]] double msve(std::span<const double> theta) const;
  [[nodiscard]] std::size_t size() const noexcept { return v_pi_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::size_t dimension_;
  std::vector<features::SparseFeatures> phi_;
  std::vector<double> v_pi_;
};

struct StepRecord {
  std::size_t episode;  ///< 1-based
  std::size_t step;     ///< 0-based within the episode
  double followon;      ///< F used by this update (etd0; 0 for td0)
  double rho;
};
using StepObserver = std::function<void(const StepRecord&)>;

struct RunOptions {
  std::size_t eval_stride = 1;
  double divergence_threshold = 1e6;
  StepObserver observer;
};

struct RunResult {
  /// MSVE after episodes stride, 2*stride, ...; NaN from the diverged episode on.
  std::vector<double> msve;
  bool diverged = false;
  /// 1-based episode in which the guard tripped (0 if never).
  std::size_t diverged_episode = 0;
};

/// One independent learning run from theta = 0.
RunResult run_single(Method method, Mode mode, double alpha, std::size_t episodes, std::uint64_t seed,
                     const EvalSet& eval, const features::TileCoder& coder, const RunOptions& options = {});

struct CurvePoint {
  double alpha;
  std::size_t episode;
  std::optional<double> mean_msve;  ///< empty when every run has diverged by this point
  double stderr_msve;
  std::size_t n_runs;
};

struct StudyRow {
  double alpha;
  std::optional<double> mean_tail_msve;  ///< over non-diverged runs only
  std::optional<double> stderr_tail;
  std::size_t diverged_runs;
};

struct ExperimentResult {
  std::vector<CurvePoint> curve;
  std::vector<StudyRow> study;
  /// runs[alpha_index][run_index]
  std::vector<std::vector<RunResult>> runs;
};

/// Number of trailing points averaged for a tail of `fraction` of n points (at least 1).
[[nodiscard]] std::size_t tail_window(std::size_t n, double fraction) noexcept;

/// Sample standard deviation / sqrt(n); 0 for fewer than two values.
[[nodiscard]] double standard_error(std::span<const double> values);

/// All alphas x runs, aggregated in (alpha, run) order whatever the execution mode.
ExperimentResult execute_experiment(const ExperimentConfig& cfg, const oracle::TrueValueTable& table,
                                    Execution exec = Execution::Parallel);

void write_learning_curve(std::ostream& out, const ExperimentResult& result);
void write_param_study(std::ostream& out, const ExperimentResult& result);
void write_manifest(std::ostream& out, const ExperimentConfig& cfg, const oracle::Provenance& provenance);
/// Per-run series: alpha,run,seed,episode,msve (empty msve after divergence).
void write_run_dump(std::ostream& out, const ExperimentConfig& cfg, const ExperimentResult& result);

[[nodiscard]] const char* code_version() noexcept;

struct ExperimentOptions {
  Execution exec = Execution::Parallel;
  bool dump_runs = false;
};

/// Loads the oracle, runs everything and writes learning_curve.csv,
/// param_study.csv, manifest.txt (and runs.csv when dumping) to output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options = {});

struct BounceReport {
  bool applicable = false;  ///< false for empty or diverged curves
  double min_error = 0.0;   ///< minimum of the moving-average-smoothed curve
  double final_error = 0.0; ///< mean of the tail window
  bool bounce = false;      ///< min_error < 0.9 * final_error
};

/// Smoothing window is max(1, n / 100) points.
BounceReport detect_bounce(std::span<const double> curve, double tail_fraction = 0.01);

/// mean_msve series per alpha from a learning_curve.csv (NaN for empty means).
std::map<double, std::vector<double>> read_learning_curve(std::istream& in);

}  // namespace etdlab::harness
