#include "etdlab/oracle.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "etdlab/errors.hpp"
#include "etdlab/text.hpp"

namespace etdlab::oracle {

std::vector<env::CarState> collect_states(std::size_t total_steps, std::size_t sample_size,
                                          const policies::PolicyKind& behavior, Rng& rng) {
  const std::size_t half = total_steps / 2;
  if (sample_size > half)
    throw ConfigError("sample size " + std::to_string(sample_size) + " exceeds half of " +
                      std::to_string(total_steps) + " steps");

  // Only the second half of the log is ever sampled.
  std::vector<env::CarState> log;
  log.reserve(half);
  const std::size_t keep_from = total_steps - half;
  env::CarState s = env::mc_reset(rng);
  for (std::size_t t = 0; t < total_steps; ++t) {
    if (t >= keep_from) log.push_back(s);
    const auto a = policies::behavior_sample(behavior, s, rng);
    const auto tr = env::mc_step(s, a);
    s = tr.terminal ? env::mc_reset(rng) : tr.next;
  }

  // Partial Fisher-Yates over log positions.
  std::vector<std::uint32_t> idx(log.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::vector<env::CarState> out;
  out.reserve(sample_size);
  for (std::size_t i = 0; i < sample_size; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(log[idx[i]]);
  }
  return out;
}

Rollout target_rollout(const env::CarState& start, Rng& /*rng*/, std::size_t cap) {
  env::CarState s = start;
  for (std::size_t t = 0; t < cap; ++t) {
    const auto tr = env::mc_step(s, policies::target_action(s));
    if (tr.terminal) return {-static_cast<double>(t + 1), false};
    s = tr.next;
  }
  return {-static_cast<double>(cap), true};
}

TrueValueTable estimate_true_values(std::span<const env::CarState> states, std::size_t rollouts,
                                    std::uint64_t seed, Execution exec) {
  return estimate_true_values(
      states, rollouts, seed, [](const env::CarState& s, Rng& rng) { return target_rollout(s, rng); }, exec);
}

TrueValueTable estimate_true_values(std::span<const env::CarState> states, std::size_t rollouts,
                                    std::uint64_t seed, const RolloutFn& rollout, Execution exec) {
  if (rollouts < 2) throw ConfigError("at least 2 rollouts per state are needed for a standard error");
  for (const auto& s : states)
    if (!env::in_bounds(s)) throw DomainError("oracle state outside the Mountain Car bounds");

  TrueValueTable table;
  table.entries.resize(states.size());
  table.provenance.sample_size = states.size();
  table.provenance.rollouts = rollouts;
  table.provenance.seed = seed;

  const auto n = static_cast<std::ptrdiff_t>(states.size());
  auto one = [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    Rng rng(derive_seed(seed, k));
    std::vector<double> returns(rollouts);
    std::size_t capped = 0;
    for (auto& g : returns) {
      const Rollout r = rollout(states[k], rng);
      g = r.ret;
      capped += r.capped ? 1 : 0;
    }
    const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(rollouts);
    double ss = 0.0;
    for (double g : returns) ss += (g - mean) * (g - mean);
    const double sd = std::sqrt(ss / static_cast<double>(rollouts - 1));
    table.entries[k] = {states[k], mean, sd / std::sqrt(static_cast<double>(rollouts)), rollouts, capped};
  };

  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  return table;
}

double msve(std::span<const double> theta, const features::TileCoder& coder, const TrueValueTable& table) {
  if (table.entries.empty()) throw ConfigError("MSVE over an empty table");
  features::SparseFeatures phi;
  double acc = 0.0;
  for (const auto& e : table.entries) {
    coder.encode_into(e.state, phi);
    const double err = features::dot(theta, phi) - e.v_pi;
    acc += err * err;
  }
  return acc / static_cast<double>(table.entries.size());
}

void write_table(std::ostream& out, const TrueValueTable& table) {
  const auto& p = table.provenance;
  out << "# steps=" << p.total_steps << ",sample=" << p.sample_size << ",rollouts=" << p.rollouts
      << ",seed=" << p.seed << ",epsilon=" << text::format_double(p.epsilon) << "\n";
  out << "position,velocity,v_pi,mc_stderr,n_rollouts\n";
  for (const auto& e : table.entries) {
    out << text::format_double(e.state.position) << ',' << text::format_double(e.state.velocity) << ','
        << text::format_double(e.v_pi) << ',' << text::format_double(e.mc_stderr) << ',' << e.n_rollouts
        << "\n";
  }
}

namespace {

Provenance parse_provenance(std::string_view line, std::size_t lineno) {
  Provenance p;
  bool steps = false, sample = false, rollouts = false, seed = false;
  for (const auto& field : text::split(line, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "metadata field without '=': " + field);
    const std::string key(text::trim(std::string_view(field).substr(0, eq)));
    const std::string_view value = std::string_view(field).substr(eq + 1);
    auto u64 = [&](std::uint64_t& dst, bool& seen) {
      if (!text::parse_u64(value, dst)) throw ParseError(lineno, "bad integer for " + key);
      seen = true;
    };
    if (key == "steps") u64(p.total_steps, steps);
    else if (key == "sample") u64(p.sample_size, sample);
    else if (key == "rollouts") u64(p.rollouts, rollouts);
    else if (key == "seed") u64(p.seed, seed);
    else if (key == "epsilon") {
      if (!text::parse_double(value, p.epsilon)) throw ParseError(lineno, "bad number for epsilon");
    } else {
      throw ParseError(lineno, "unknown metadata key '" + key + "'");
    }
  }
  if (!(steps && sample && rollouts && seed))
    throw ParseError(lineno, "metadata needs steps, sample, rollouts and seed");
  return p;
}

}  // namespace

TrueValueTable read_table(std::istream& in) {
  TrueValueTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_meta = false;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (have_meta) throw ParseError(lineno, "duplicate metadata line");
      table.provenance = parse_provenance(text::trim(body.substr(1)), lineno);
      have_meta = true;
      continue;
    }
    if (!have_header) {
      if (body != "position,velocity,v_pi,mc_stderr,n_rollouts")
        throw ParseError(lineno, "expected header 'position,velocity,v_pi,mc_stderr,n_rollouts'");
      have_header = true;
      continue;
    }
    const auto cols = text::split(body, ',');
    if (cols.size() != 5)
      throw ParseError(lineno, "expected 5 columns, found " + std::to_string(cols.size()));
    TrueValueEntry e;
    std::uint64_t n = 0;
    if (!text::parse_double(cols[0], e.state.position) || !text::parse_double(cols[1], e.state.velocity) ||
        !text::parse_double(cols[2], e.v_pi) || !text::parse_double(cols[3], e.mc_stderr) ||
        !text::parse_u64(cols[4], n))
      throw ParseError(lineno, "malformed number");
    e.n_rollouts = n;
    table.entries.push_back(e);
  }
  if (!have_meta) throw ParseError(lineno, "missing '# steps=..' metadata line");
  if (!have_header) throw ParseError(lineno, "missing column header");
  return table;
}

void save_table(const TrueValueTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write oracle table " + path.string());
  write_table(out, table);
  if (!out) throw ConfigError("write failed for oracle table " + path.string());
}

TrueValueTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open oracle table " + path.string());
  return read_table(in);
}

}  // namespace etdlab::oracle
