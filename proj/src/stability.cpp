#include "etdlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "etdlab/errors.hpp"

namespace etdlab::stability {
namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kResidualTol = 1e-10;
constexpr double kPowerTol = 1e-12;
constexpr std::size_t kPowerBudget = 1'000'000;

bool strongly_connected(const Matrix& p) {
  const std::size_t n = p.rows();
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double w = forward ? p(i, j) : p(j, i);
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return n > 0 && reach_all(true) && reach_all(false);
}

double residual(const Matrix& p, std::span<const double> mu) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i) acc += mu[i] * p(i, j);
    worst = std::max(worst, std::abs(acc - mu[j]));
  }
  return worst;
}

bool acceptable(const Matrix& p, std::span<const double> mu) {
  return std::all_of(mu.begin(), mu.end(), [](double m) { return m > 0.0; }) &&
         residual(p, mu) <= kResidualTol;
}

std::vector<double> direct_stationary(const Matrix& p) {
  const std::size_t n = p.rows();
  Matrix lhs = p.transpose() - Matrix::identity(n);
  Matrix rhs(n, 1);
  for (std::size_t j = 0; j < n; ++j) lhs(n - 1, j) = 1.0;
  rhs(n - 1, 0) = 1.0;
  Matrix x;
  if (!solve(lhs, rhs, x)) return {};
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = x(i, 0);
  return mu;
}

// Routh array first column; zero leading entries get replaced by a small
// epsilon, all-zero rows by the derivative of the auxiliary polynomial.
std::vector<double> routh_first_column(std::span<const double> coeffs) {
  std::size_t lead = 0;
  while (lead < coeffs.size() && coeffs[lead] == 0.0) ++lead;
  std::vector<double> c(coeffs.begin() + static_cast<std::ptrdiff_t>(lead), coeffs.end());
  if (c.empty()) throw ContractError("Routh array of the zero polynomial");
  const std::size_t degree = c.size() - 1;
  const std::size_t width = degree / 2 + 1;

  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  const double eps = 1e-12 * scale;
  const double zero_tol = 1e-14 * scale;

  std::vector<std::vector<double>> rows(degree + 1, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i <= degree; ++i) rows[i % 2][i / 2] = c[i];

  for (std::size_t r = 2; r <= degree; ++r) {
    auto& prev = rows[r - 1];
    const auto& prev2 = rows[r - 2];
    const bool all_zero =
        std::all_of(prev.begin(), prev.end(), [&](double v) { return std::abs(v) <= zero_tol; });
    if (all_zero) {
      // Auxiliary polynomial from row r-2 has powers degree-(r-2), -2, ...
      const std::size_t power = degree - (r - 2);
      for (std::size_t k = 0; k < width; ++k) {
        const auto pk = static_cast<double>(power) - 2.0 * static_cast<double>(k);
        prev[k] = pk > 0 ? pk * prev2[k] : 0.0;
      }
    }
    if (std::abs(prev[0]) <= zero_tol) prev[0] = eps;
    for (std::size_t k = 0; k + 1 < width; ++k)
      rows[r][k] = (prev[0] * prev2[k + 1] - prev2[0] * prev[k + 1]) / prev[0];
  }
  if (degree >= 1 && std::abs(rows[degree][0]) <= zero_tol) rows[degree][0] = eps;

  std::vector<double> first(degree + 1);
  for (std::size_t r = 0; r <= degree; ++r) first[r] = rows[r][0];
  return first;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "not a number: '" + tok + "'");
  }
}

}  // namespace

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

void validate(const FiniteMRP& mrp) {
  const std::size_t n = mrp.transition.rows();
  if (n == 0 || !mrp.transition.square()) throw ConfigError("transition matrix must be square and non-empty");
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (double p : mrp.transition.row(i)) {
      if (p < 0.0) throw ConfigError("transition matrix has a negative entry in row " + std::to_string(i));
      total += p;
    }
    if (std::abs(total - 1.0) > kStochasticTol)
      throw ConfigError("transition row " + std::to_string(i) + " does not sum to 1");
  }
  if (mrp.gamma.size() != n || mrp.lambda.size() != n)
    throw ConfigError("gamma and lambda need one value per state");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!std::all_of(mrp.gamma.begin(), mrp.gamma.end(), unit)) throw ConfigError("gamma must lie in [0, 1]");
  if (!std::all_of(mrp.lambda.begin(), mrp.lambda.end(), unit)) throw ConfigError("lambda must lie in [0, 1]");
  if (mrp.features.rows() != n || mrp.features.cols() == 0)
    throw ConfigError("feature matrix needs one row per state and at least one column");
  if (rank(mrp.features) != mrp.features.cols())
    throw ConfigError("feature matrix columns are linearly dependent");
}

FiniteMRP counterexample() {
  return FiniteMRP{Matrix{{0.0, 1.0}, {1.0, 0.0}}, {0.95, 0.95}, {0.0, 1.0}, Matrix{{3.0, 1.0}, {1.0, 1.0}}};
}

std::vector<double> stationary_distribution(const Matrix& transition) {
  if (!transition.square() || transition.rows() == 0) throw ConfigError("transition matrix must be square");
  if (!strongly_connected(transition)) throw IrreducibilityError("transition matrix is not irreducible");
  const std::size_t n = transition.rows();

  // Power iteration on the lazy chain (I + P) / 2: same invariant
  // distribution, but aperiodic, so periodic chains converge too.
  std::vector<double> mu(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  for (std::size_t it = 0; it < kPowerBudget; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += mu[i] * transition(i, j);
      next[j] = 0.5 * (mu[j] + acc);
    }
    double total = 0.0;
    for (double v : next) total += v;
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= total;
      change = std::max(change, std::abs(next[j] - mu[j]));
    }
    mu.swap(next);
    if (change <= kPowerTol) break;
  }
  if (acceptable(transition, mu)) return mu;

  auto direct = direct_stationary(transition);
  if (!direct.empty() && acceptable(transition, direct)) return direct;
  throw IrreducibilityError("no stationary distribution within residual tolerance");
}

Matrix lambda_transition(const Matrix& transition, std::span<const double> gamma,
                         std::span<const double> lambda) {
  const std::size_t n = transition.rows();
  if (!transition.square() || gamma.size() != n || lambda.size() != n)
    throw ContractError("lambda_transition: dimension mismatch");
  Matrix p_gamma = transition;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p_gamma(i, j) *= gamma[j];

  Matrix lhs = Matrix::identity(n);
  Matrix rhs(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      lhs(i, j) -= p_gamma(i, j) * lambda[j];
      rhs(i, j) = p_gamma(i, j) * (1.0 - lambda[j]);
    }
  Matrix out;
  if (!solve(lhs, rhs, out))
    throw DegenerateLambdaError("I - P Gamma Lambda is singular (lambda-return never terminates)");
  return out;
}

std::size_t routh_right_half_plane_roots(std::span<const double> coeffs) {
  const auto first = routh_first_column(coeffs);
  std::size_t changes = 0;
  for (std::size_t i = 1; i < first.size(); ++i)
    if ((first[i - 1] > 0.0) != (first[i] > 0.0)) ++changes;
  return changes;
}

std::size_t eigenvalues_left_of(const Matrix& a, double shift) {
  // Eigenvalues of (shift I - A) are shift - lambda; Re(lambda) < shift
  // exactly when that root lies in the right half plane.
  Matrix b = -1.0 * a;
  for (std::size_t i = 0; i < b.rows(); ++i) b(i, i) += shift;
  return routh_right_half_plane_roots(characteristic_polynomial(b));
}

std::vector<double> eigenvalue_real_parts(const Matrix& a, double tol) {
  if (!a.square()) throw ContractError("eigenvalue_real_parts: matrix not square");
  const std::size_t n = a.rows();
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    radius = std::max(radius, s);
  }
  const double lo0 = -radius - 1.0;
  const double hi0 = radius + 1.0;

  std::vector<double> parts;
  parts.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    // Smallest shift c with at least k eigenvalues left of c.
    double lo = lo0;
    double hi = hi0;
    while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (eigenvalues_left_of(a, mid) >= k)
        hi = mid;
      else
        lo = mid;
    }
    parts.push_back(0.5 * (lo + hi));
  }
  std::sort(parts.begin(), parts.end());
  return parts;
}

Verdict classify_stability(const Matrix& a, double tol) {
  if (eigenvalues_left_of(a, -tol) > 0) return Verdict::Unstable;
  if (eigenvalues_left_of(a, tol) == 0) return Verdict::Stable;
  return Verdict::Indeterminate;
}

Verdict classify_stability(const KeyMatrixReport& report) { return classify_stability(report.a); }

KeyMatrixReport key_matrix(const FiniteMRP& mrp) {
  validate(mrp);
  const std::size_t n = mrp.num_states();
  KeyMatrixReport r;
  r.mu = stationary_distribution(mrp.transition);
  r.p_lambda = lambda_transition(mrp.transition, mrp.gamma, mrp.lambda);

  const Matrix d = Matrix::diagonal(r.mu);
  r.a = mrp.features.transpose() * d * (Matrix::identity(n) - r.p_lambda) * mrp.features;

  const Matrix sym = 0.5 * (r.a + r.a.transpose());
  r.symmetric_part_eigs = symmetric_eigenvalues(sym);
  r.positive_definite = !r.symmetric_part_eigs.empty() && r.symmetric_part_eigs.front() > kVerdictTolerance;
  r.verdict = classify_stability(r.a);
  r.hurwitz_stable = r.verdict == Verdict::Stable;
  r.eig_real_parts = eigenvalue_real_parts(r.a);
  return r;
}

IterationTrace expected_update_iterate(const Matrix& a, double alpha, std::span<const double> theta0,
                                       std::size_t max_iters, double threshold) {
  if (!(alpha > 0.0)) throw ConfigError("step size must be positive");
  if (!a.square() || a.cols() != theta0.size()) throw ContractError("expected_update_iterate: dimension mismatch");
  IterationTrace out;
  std::vector<double> theta(theta0.begin(), theta0.end());
  out.norms.push_back(max_abs(theta));
  for (std::size_t it = 0; it < max_iters; ++it) {
    const auto at = multiply(a, theta);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= alpha * at[i];
    const double norm = max_abs(theta);
    out.norms.push_back(norm);
    if (!std::isfinite(norm) || norm > threshold) {
      out.diverged = true;
      break;
    }
  }
  return out;
}

FiniteMRP parse_chain(std::istream& in) {
  enum class Section { None, P, Gamma, Lambda, Phi };
  Section section = Section::None;
  std::vector<std::vector<double>> p_rows, phi_rows;
  std::vector<double> gamma, lambda;
  bool seen_p = false, seen_gamma = false, seen_lambda = false, seen_phi = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty() || toks.front().starts_with('#')) continue;
    if (toks.front().starts_with('[')) {
      if (toks.size() != 1) throw ParseError(lineno, "section header must be alone on its line");
      const std::string& h = toks.front();
      auto enter = [&](Section s, bool& seen) {
        if (seen) throw ParseError(lineno, "duplicate section " + h);
        seen = true;
        section = s;
      };
      if (h == "[P]") enter(Section::P, seen_p);
      else if (h == "[gamma]") enter(Section::Gamma, seen_gamma);
      else if (h == "[lambda]") enter(Section::Lambda, seen_lambda);
      else if (h == "[Phi]") enter(Section::Phi, seen_phi);
      else throw ParseError(lineno, "unknown section " + h);
      continue;
    }
    std::vector<double> values;
    values.reserve(toks.size());
    for (const auto& t : toks) values.push_back(parse_number(t, lineno));
    switch (section) {
      case Section::None: throw ParseError(lineno, "data before any section header");
      case Section::P: p_rows.push_back(std::move(values)); break;
      case Section::Phi: phi_rows.push_back(std::move(values)); break;
      case Section::Gamma: gamma.insert(gamma.end(), values.begin(), values.end()); break;
      case Section::Lambda: lambda.insert(lambda.end(), values.begin(), values.end()); break;
    }
  }
  if (!seen_p || !seen_gamma || !seen_lambda || !seen_phi)
    throw ParseError(lineno, "chain file needs [P], [gamma], [lambda] and [Phi] sections");

  auto to_matrix = [&](const std::vector<std::vector<double>>& rows, const char* name) {
    if (rows.empty()) throw ParseError(lineno, std::string("section ") + name + " is empty");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols())
        throw ParseError(lineno, std::string("ragged rows in section ") + name);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  };
  FiniteMRP mrp;
  mrp.transition = to_matrix(p_rows, "[P]");
  mrp.features = to_matrix(phi_rows, "[Phi]");
  const std::size_t n = mrp.transition.rows();
  auto broadcast = [&](std::vector<double> v, const char* name) {
    if (v.size() == 1) v.assign(n, v.front());
    if (v.size() != n) throw ParseError(lineno, std::string("section ") + name + " needs 1 or n values");
    return v;
  };
  mrp.gamma = broadcast(std::move(gamma), "[gamma]");
  mrp.lambda = broadcast(std::move(lambda), "[lambda]");
  validate(mrp);
  return mrp;
}

FiniteMRP load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open chain file " + path.string());
  return parse_chain(in);
}

std::string format_report(const KeyMatrixReport& r) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "% .10g", v);
    return std::string(buf);
  };
  auto vec = [&](std::span<const double> v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + ")";
  };
  auto mat = [&](const Matrix& m) {
    std::string s;
    for (std::size_t i = 0; i < m.rows(); ++i) s += "  " + vec(m.row(i)) + "\n";
    return s;
  };
  os << "stationary distribution: " << vec(r.mu) << "\n";
  os << "P^lambda:\n" << mat(r.p_lambda);
  os << "key matrix A:\n" << mat(r.a);
  os << "symmetric part eigenvalues: " << vec(r.symmetric_part_eigs) << "\n";
  os << "positive definite: " << (r.positive_definite ? "yes" : "no") << "\n";
  os << "eigenvalue real parts: " << vec(r.eig_real_parts) << "\n";
  os << "-A Hurwitz: " << (r.hurwitz_stable ? "yes" : "no") << "\n";
  os << "verdict: " << to_string(r.verdict) << "\n";
  return os.str();
}

}  // namespace etdlab::stability
