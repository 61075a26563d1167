#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "etdlab/linalg.hpp"

namespace etdlab::stability {

/// Finite Markov reward process under a fixed policy, as seen by linear TD(lambda).
struct FiniteMRP {
  Matrix transition;           ///< n x n, row-stochastic
  std::vector<double> gamma;   ///< per-state discount in [0, 1]
  std::vector<double> lambda;  ///< per-state bootstrapping parameter in [0, 1]
  Matrix features;             ///< n x k, full column rank

  [[nodiscard]] std::size_t num_states() const noexcept { return transition.rows(); }
  [[nodiscard]] std::size_t num_features() const noexcept { return features.cols(); }
};

/// Throws ConfigError describing the first violated invariant.
void validate(const FiniteMRP& mrp);

/// Two-state deterministic cycle with lambda = (0, 1), gamma = 0.95 and
/// features (3, 1), (1, 1): TD(lambda) diverges on it.
FiniteMRP counterexample();

enum class Verdict { Stable, Unstable, Indeterminate };

[[nodiscard]] const char* to_string(Verdict v) noexcept;

struct KeyMatrixReport {
  std::vector<double> mu;
  Matrix p_lambda;
  Matrix a;
  std::vector<double> symmetric_part_eigs;
  bool positive_definite = false;
  /// All eigenvalues of A have positive real part, i.e. -A is Hurwitz.
  bool hurwitz_stable = false;
  /// Real parts of the eigenvalues of A (with multiplicity), ascending.
  std::vector<double> eig_real_parts;
  Verdict verdict = Verdict::Indeterminate;
};

inline constexpr double kVerdictTolerance = 1e-9;

/// mu^T P = mu^T, sum mu = 1, mu > 0. Throws IrreducibilityError when P is
/// not irreducible or no solution meets the 1e-10 residual.
std::vector<double> stationary_distribution(const Matrix& transition);

/// P^lambda = (I - P Gamma Lambda)^{-1} P Gamma (I - Lambda).
/// Throws DegenerateLambdaError when (I - P Gamma Lambda) is singular.
Matrix lambda_transition(const Matrix& transition, std::span<const double> gamma,
                         std::span<const double> lambda);

/// A = Phi^T D (I - P^lambda) Phi with D = diag(mu), plus its stability analysis.
KeyMatrixReport key_matrix(const FiniteMRP& mrp);

/// Number of roots of the real polynomial c[0] s^n + ... + c[n] with strictly
/// positive real part, from sign changes in the first column of its Routh array.
std::size_t routh_right_half_plane_roots(std::span<const double> coeffs);

/// Number of eigenvalues of A with real part strictly below `shift`.
std::size_t eigenvalues_left_of(const Matrix& a, double shift);

/// Real parts of A's eigenvalues by bisection on eigenvalues_left_of.
std::vector<double> eigenvalue_real_parts(const Matrix& a, double tol = 1e-12);

/// Stable iff every eigenvalue real part of A exceeds tol; Unstable if some
/// real part is below -tol; Indeterminate otherwise.
Verdict classify_stability(const Matrix& a, double tol = kVerdictTolerance);
Verdict classify_stability(const KeyMatrixReport& report);

struct IterationTrace {
  std::vector<double> norms;  ///< ||theta||_inf, starting with theta0
  bool diverged = false;
};

/// Expected TD update with zero rewards: theta <- theta - alpha A theta,
/// until ||theta||_inf > threshold or max_iters steps.
IterationTrace expected_update_iterate(const Matrix& a, double alpha, std::span<const double> theta0,
                                       std::size_t max_iters, double threshold = 1e6);

/// Chain file: sections `[P]`, `[gamma]`, `[lambda]`, `[Phi]` with one matrix
/// row per line; `gamma`/`lambda` may give a single value for every state.
/// Lines starting with '#' are comments.
FiniteMRP parse_chain(std::istream& in);
FiniteMRP load_chain(const std::filesystem::path& path);

std::string format_report(const KeyMatrixReport& report);

}  // namespace etdlab::stability
