#include "etdlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "etdlab/errors.hpp"
#include "etdlab/learners.hpp"
#include "etdlab/policies.hpp"
#include "etdlab/text.hpp"

#ifndef ETDLAB_VERSION
#define ETDLAB_VERSION "unknown"
#endif

namespace etdlab::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string opt_number(const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); }

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  body(out);
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace

EvalSet::EvalSet(const features::TileCoder& coder, const oracle::TrueValueTable& table)
    : dimension_(coder.dimension()) {
  if (table.entries.empty()) throw ConfigError("oracle table is empty");
  phi_.reserve(table.entries.size());
  v_pi_.reserve(table.entries.size());
  for (const auto& e : table.entries) {
    phi_.push_back(coder.encode(e.state));
    v_pi_.push_back(e.v_pi);
  }
}

double EvalSet::msve(std::span<const double> theta) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < phi_.size(); ++i) {
    const double err = features::dot(theta, phi_[i]) - v_pi_[i];
    acc += err * err;
  }
  return acc / static_cast<double>(phi_.size());
}

RunResult run_single(Method method, Mode mode, double alpha, std::size_t episodes, std::uint64_t seed,
                     const EvalSet& eval, const features::TileCoder& coder, const RunOptions& options) {
  if (eval.dimension() != coder.dimension())
    throw ConfigError("oracle evaluation set and tile coder disagree on feature dimension");
  if (options.eval_stride == 0) throw ConfigError("eval_stride must be at least 1");

  const auto behavior =
      mode == Mode::OnPolicy ? policies::PolicyKind::target() : policies::PolicyKind::behavior(kOffPolicyEpsilon);
  auto learner = learners::make_learner(coder.dimension(), alpha, options.divergence_threshold);
  const auto update = method == Method::Td0 ? &learners::td0_update : &learners::etd0_update;

  Rng rng(seed);
  RunResult result;
  result.msve.assign(episodes / options.eval_stride, kNaN);
  features::SparseFeatures phi;
  features::SparseFeatures phi_next;

  for (std::size_t ep = 1; ep <= episodes; ++ep) {
    learners::begin_episode(learner);
    env::CarState s = env::mc_reset(rng);
    coder.encode_into(s, phi);
    for (std::size_t step = 0;; ++step) {
      const env::Action a = policies::behavior_sample(behavior, s, rng);
      const double rho = mode == Mode::OnPolicy ? 1.0 : policies::importance_ratio(s, a, behavior);
      const env::Transition tr = env::mc_step(s, a);
      coder.encode_into(tr, phi_next);
      const auto status = update(learner, {phi, tr.reward, phi_next, rho});
      if (options.observer) options.observer({ep, step, learner.followon, rho});
      if (status == learners::UpdateStatus::Diverged) {
        result.diverged = true;
        result.diverged_episode = ep;
        return result;
      }
      if (tr.terminal) break;
      s = tr.next;
      std::swap(phi, phi_next);
    }
    if (ep % options.eval_stride == 0) result.msve[ep / options.eval_stride - 1] = eval.msve(learner.theta);
  }
  return result;
}

std::size_t tail_window(std::size_t n, double fraction) noexcept {
  // Shave a relative 1e-12 so 0.01 * 30000 is 300, not 301.
  const double w = std::ceil(fraction * static_cast<double>(n) * (1.0 - 1e-12));
  return std::clamp<std::size_t>(static_cast<std::size_t>(w), 1, std::max<std::size_t>(n, 1));
}

double standard_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

ExperimentResult execute_experiment(const ExperimentConfig& cfg, const oracle::TrueValueTable& table,
                                    Execution exec) {
  validate(cfg);
  const features::TileCoder coder{features::TileCodingConfig{}};
  const EvalSet eval(coder, table);
  const RunOptions options{cfg.eval_stride, cfg.divergence_threshold, {}};

  ExperimentResult result;
  result.runs.assign(cfg.alphas.size(), std::vector<RunResult>(cfg.runs));
  const auto tasks = static_cast<std::ptrdiff_t>(cfg.alphas.size() * cfg.runs);
  auto task = [&](std::ptrdiff_t t) {
    const auto a = static_cast<std::size_t>(t) / cfg.runs;
    const auto r = static_cast<std::size_t>(t) % cfg.runs;
    result.runs[a][r] = run_single(cfg.method, cfg.mode, cfg.alphas[a], cfg.episodes,
                                   run_seed(cfg.base_seed, a, r), eval, coder, options);
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < tasks; ++t) task(t);
  } else {
    for (std::ptrdiff_t t = 0; t < tasks; ++t) task(t);
  }

  const std::size_t points = cfg.episodes / cfg.eval_stride;
  std::vector<double> values;
  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    const auto& runs = result.runs[a];
    for (std::size_t i = 0; i < points; ++i) {
      values.clear();
      for (const auto& run : runs)
        if (std::isfinite(run.msve[i])) values.push_back(run.msve[i]);
      CurvePoint p{cfg.alphas[a], (i + 1) * cfg.eval_stride, std::nullopt, 0.0, values.size()};
      if (!values.empty()) {
        p.mean_msve = mean_of(values);
        p.stderr_msve = standard_error(values);
      }
      result.curve.push_back(p);
    }

    StudyRow row{cfg.alphas[a], std::nullopt, std::nullopt, 0};
    values.clear();
    for (const auto& run : runs) {
      if (run.diverged || points == 0) {
        row.diverged_runs += run.diverged ? 1 : 0;
        continue;
      }
      const std::size_t w = tail_window(points, cfg.tail_fraction);
      values.push_back(mean_of(std::span<const double>(run.msve).last(w)));
    }
    if (!values.empty()) {
      row.mean_tail_msve = mean_of(values);
      row.stderr_tail = standard_error(values);
    }
    result.study.push_back(row);
  }
  return result;
}

void write_learning_curve(std::ostream& out, const ExperimentResult& result) {
  out << "alpha,episode,mean_msve,stderr,n_runs\n";
  for (const auto& p : result.curve)
    out << text::format_double(p.alpha) << ',' << p.episode << ',' << opt_number(p.mean_msve) << ','
        << text::format_double(p.stderr_msve) << ',' << p.n_runs << "\n";
}

void write_param_study(std::ostream& out, const ExperimentResult& result) {
  out << "alpha,mean_tail_msve,stderr,diverged_runs\n";
  for (const auto& r : result.study)
    out << text::format_double(r.alpha) << ',' << opt_number(r.mean_tail_msve) << ','
        << opt_number(r.stderr_tail) << ',' << r.diverged_runs << "\n";
}

const char* code_version() noexcept { return ETDLAB_VERSION; }

void write_manifest(std::ostream& out, const ExperimentConfig& cfg, const oracle::Provenance& p) {
  out << "# etdlab experiment manifest\n";
  out << "code_version = " << code_version() << "\n";
  out << to_text(cfg);
  out << "seed_rule = base_seed + alpha_index * 1000000 + run_index\n";
  out << "behavior_epsilon = " << text::format_double(cfg.mode == Mode::OnPolicy ? 0.0 : kOffPolicyEpsilon)
      << "\n";
  out << "tile_coding = 5 tilings x (4+1)^2 tiles, offsets -i/5 tile widths\n";
  out << "oracle = steps=" << p.total_steps << ",sample=" << p.sample_size << ",rollouts=" << p.rollouts
      << ",seed=" << p.seed << ",epsilon=" << text::format_double(p.epsilon) << "\n";
}

void write_run_dump(std::ostream& out, const ExperimentConfig& cfg, const ExperimentResult& result) {
  out << "alpha,run,seed,episode,msve\n";
  for (std::size_t a = 0; a < result.runs.size(); ++a)
    for (std::size_t r = 0; r < result.runs[a].size(); ++r) {
      const auto& series = result.runs[a][r].msve;
      for (std::size_t i = 0; i < series.size(); ++i)
        out << text::format_double(cfg.alphas[a]) << ',' << r << ',' << run_seed(cfg.base_seed, a, r) << ','
            << (i + 1) * cfg.eval_stride << ','
            << (std::isfinite(series[i]) ? text::format_double(series[i]) : std::string()) << "\n";
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options) {
  validate(cfg);
  const auto table = oracle::load_table(cfg.oracle_path);
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.output_dir))
    throw ConfigError("cannot create output directory " + cfg.output_dir.string());

  auto result = execute_experiment(cfg, table, options.exec);
  write_file(cfg.output_dir / "learning_curve.csv", [&](std::ostream& o) { write_learning_curve(o, result); });
  write_file(cfg.output_dir / "param_study.csv", [&](std::ostream& o) { write_param_study(o, result); });
  write_file(cfg.output_dir / "manifest.txt", [&](std::ostream& o) { write_manifest(o, cfg, table.provenance); });
  if (options.dump_runs)
    write_file(cfg.output_dir / "runs.csv", [&](std::ostream& o) { write_run_dump(o, cfg, result); });
  return result;
}

BounceReport detect_bounce(std::span<const double> curve, double tail_fraction) {
  BounceReport report;
  const std::size_t n = curve.size();
  if (n == 0) return report;
  for (double v : curve)
    if (!std::isfinite(v)) return report;

  const std::size_t window = std::max<std::size_t>(1, n / 100);
  double running = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    running += curve[i];
    if (i >= window) running -= curve[i - window];
    if (i + 1 >= window) smallest = std::min(smallest, running / static_cast<double>(window));
  }
  report.applicable = true;
  report.min_error = smallest;
  report.final_error = mean_of(curve.last(tail_window(n, tail_fraction)));
  report.bounce = report.min_error < 0.9 * report.final_error;
  return report;
}

std::map<double, std::vector<double>> read_learning_curve(std::istream& in) {
  std::map<double, std::vector<double>> series;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    if (!header) {
      if (body != "alpha,episode,mean_msve,stderr,n_runs")
        throw ParseError(lineno, "expected header 'alpha,episode,mean_msve,stderr,n_runs'");
      header = true;
      continue;
    }
    const auto cols = text::split(body, ',');
    if (cols.size() != 5) throw ParseError(lineno, "expected 5 columns, found " + std::to_string(cols.size()));
    double alpha = 0.0;
    if (!text::parse_double(cols[0], alpha)) throw ParseError(lineno, "malformed alpha");
    double mean = kNaN;
    if (!cols[2].empty() && !text::parse_double(cols[2], mean)) throw ParseError(lineno, "malformed mean_msve");
    series[alpha].push_back(mean);
  }
  if (!header) throw ParseError(lineno, "empty learning curve file");
  return series;
}

}  // namespace etdlab::harness
