#include "etdlab/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "etdlab/errors.hpp"
#include "etdlab/text.hpp"

namespace etdlab::harness {

const char* to_string(Method m) noexcept { return m == Method::Td0 ? "td0" : "etd0"; }
const char* to_string(Mode m) noexcept { return m == Mode::OnPolicy ? "on-policy" : "off-policy"; }

void validate(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  if (cfg.episodes < 1) throw ConfigError("episodes must be at least 1");
  if (cfg.eval_stride < 1) throw ConfigError("eval_stride must be at least 1");
  if (cfg.alphas.empty()) throw ConfigError("alphas must not be empty");
  for (double a : cfg.alphas)
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("every alpha must be positive and finite");
  if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0))
    throw ConfigError("tail_fraction must lie in (0, 1]");
  if (!(cfg.divergence_threshold > 0.0)) throw ConfigError("divergence_threshold must be positive");
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;

  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = text::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string_view value = text::trim(body.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError(lineno, "duplicate key '" + key + "'");
    if (value.empty()) throw ParseError(lineno, "empty value for '" + key + "'");

    auto count = [&](std::size_t& dst) {
      std::uint64_t v = 0;
      if (!text::parse_u64(value, v)) throw ParseError(lineno, "'" + key + "' must be a non-negative integer");
      dst = static_cast<std::size_t>(v);
    };
    auto real = [&](double& dst) {
      if (!text::parse_double(value, dst)) throw ParseError(lineno, "'" + key + "' must be a number");
    };

    if (key == "method") {
      if (value == "td0") cfg.method = Method::Td0;
      else if (value == "etd0") cfg.method = Method::Etd0;
      else throw ParseError(lineno, "method must be td0 or etd0");
    } else if (key == "mode") {
      if (value == "on-policy") cfg.mode = Mode::OnPolicy;
      else if (value == "off-policy") cfg.mode = Mode::OffPolicy;
      else throw ParseError(lineno, "mode must be on-policy or off-policy");
    } else if (key == "alphas") {
      for (const auto& tok : text::split(value, ',')) {
        double a = 0.0;
        if (!text::parse_double(tok, a)) throw ParseError(lineno, "bad alpha '" + tok + "'");
        cfg.alphas.push_back(a);
      }
    } else if (key == "episodes") {
      count(cfg.episodes);
    } else if (key == "runs") {
      count(cfg.runs);
    } else if (key == "base_seed") {
      if (!text::parse_u64(value, cfg.base_seed)) throw ParseError(lineno, "base_seed must be an integer");
    } else if (key == "eval_stride") {
      count(cfg.eval_stride);
    } else if (key == "oracle_path") {
      cfg.oracle_path = resolve(value);
    } else if (key == "tail_fraction") {
      real(cfg.tail_fraction);
    } else if (key == "divergence_threshold") {
      real(cfg.divergence_threshold);
    } else if (key == "output_dir") {
      cfg.output_dir = resolve(value);
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }
  for (const char* required : {"method", "mode", "alphas", "episodes", "runs", "oracle_path", "output_dir"})
    if (!seen.contains(required)) throw ParseError(lineno, std::string("missing required key '") + required + "'");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

std::string to_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "method = " << to_string(cfg.method) << "\n";
  os << "mode = " << to_string(cfg.mode) << "\n";
  os << "alphas = ";
  for (std::size_t i = 0; i < cfg.alphas.size(); ++i) os << (i ? ", " : "") << text::format_double(cfg.alphas[i]);
  os << "\n";
  os << "episodes = " << cfg.episodes << "\n";
  os << "runs = " << cfg.runs << "\n";
  os << "base_seed = " << cfg.base_seed << "\n";
  os << "eval_stride = " << cfg.eval_stride << "\n";
  os << "oracle_path = " << cfg.oracle_path.string() << "\n";
  os << "tail_fraction = " << text::format_double(cfg.tail_fraction) << "\n";
  os << "divergence_threshold = " << text::format_double(cfg.divergence_threshold) << "\n";
  os << "output_dir = " << cfg.output_dir.string() << "\n";
  return os.str();
}

}  // namespace etdlab::harness
