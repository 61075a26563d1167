// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Tolerances, seeds, grids and runtime budgets are fixed here, before any run.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "etdlab/chain_sim.hpp"
#include "etdlab/harness.hpp"
#include "etdlab/learners.hpp"
#include "etdlab/oracle.hpp"
#include "etdlab/policies.hpp"
#include "etdlab/stability.hpp"
#include "etdlab/text.hpp"
#include "support/chain_instances.hpp"

using namespace etdlab;
using harness::Method;
using harness::Mode;
using stability::Verdict;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
  }
};

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs <= budget_s, "runtime " + fmt(secs, 3) + " s <= " + fmt(budget_s) + " s");
  if (!o.pass) ++failures;
  std::printf("%s  criterion %d: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, secs);
  for (const auto& n : o.notes) std::printf("        %s\n", n.c_str());
  std::fflush(stdout);
}

std::vector<std::complex<double>> eig2(const Matrix& a) {
  const double tr = a(0, 0) + a(1, 1);
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const std::complex<double> d = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
  return {(tr - d) / 2.0, (tr + d) / 2.0};
}

// --- 1 -------------------------------------------------------------------

void counterexample_key_matrix(Outcome& o) {
  const auto r = stability::key_matrix(stability::counterexample());
  const double a_ref[2][2] = {{-0.4862, 0.1713}, {-0.7787, 0.0738}};
  const double pl_ref[2][2] = {{0.9025, 0.0}, {0.95, 0.0}};
  double a_err = 0.0, pl_err = 0.0, mu_err = 0.0;
  for (int i = 0; i < 2; ++i) {
    mu_err = std::max(mu_err, std::abs(r.mu[i] - 0.5));
    for (int j = 0; j < 2; ++j) {
      a_err = std::max(a_err, std::abs(r.a(i, j) - a_ref[i][j]));
      pl_err = std::max(pl_err, std::abs(r.p_lambda(i, j) - pl_ref[i][j]));
    }
  }
  o.check(a_err <= 1e-3, "A entrywise error " + fmt(a_err) + " <= 1e-3");
  o.check(mu_err <= 1e-10, "mu error " + fmt(mu_err) + " <= 1e-10");
  o.check(pl_err <= 1e-12, "P^lambda error " + fmt(pl_err) + " <= 1e-12");
  o.check(!r.positive_definite, "A not positive definite (symmetric-part eigs " + fmt(r.symmetric_part_eigs[0]) +
                                    ", " + fmt(r.symmetric_part_eigs[1]) + ")");
  o.check(r.verdict == Verdict::Unstable, std::string("verdict ") + stability::to_string(r.verdict));
  const double re_closed = eig2(r.a)[0].real();
  o.check(std::abs(re_closed - (-0.2062)) <= 1e-4, "quadratic-formula real part " + fmt(re_closed) + " ~ -0.2062");
  bool re_ok = r.eig_real_parts.size() == 2;
  for (double x : r.eig_real_parts) re_ok = re_ok && std::abs(x - re_closed) <= 1e-9;
  o.check(re_ok, "analysed real parts match the quadratic formula within 1e-9");
  o.check(stability::format_report(r).find("Unstable") != std::string::npos, "report states the verdict");
}

// --- 2 -------------------------------------------------------------------

void constant_lambda_control(Outcome& o) {
  for (int i = 0; i <= 9; ++i) {
    auto m = stability::counterexample();
    m.lambda.assign(2, 0.1 * i);
    const auto r = stability::key_matrix(m);
    o.check(r.positive_definite && r.verdict == Verdict::Stable,
            "lambda = " + fmt(0.1 * i, 2) + ": min symmetric eig " + fmt(r.symmetric_part_eigs[0]) + ", " +
                stability::to_string(r.verdict));
  }
}

// --- 3 -------------------------------------------------------------------

void empirical_divergence(Outcome& o) {
  const auto mrp = stability::counterexample();
  const std::vector<double> theta0{1.0, 1.0};
  const double alpha = 0.01;
  const auto sim = learners::simulate_chain_tdlambda(mrp, alpha, theta0, 10'000'000, 1);
  o.check(sim.diverged, "sampled TD(lambda) tripped the 1e6 guard after " + std::to_string(sim.steps) + " steps");
  const auto a = stability::key_matrix(mrp).a;
  const auto it = stability::expected_update_iterate(a, alpha, theta0, 10'000'000);
  o.check(it.diverged, "expected update tripped the guard after " + std::to_string(it.norms.size() - 1) + " iterations");
  const Matrix step = Matrix::identity(2) - alpha * a;
  double radius = 0.0;
  for (auto z : eig2(step)) radius = std::max(radius, std::abs(z));
  o.check(radius > 1.0, "spectral radius of I - alpha A = " + fmt(radius, 10) + " > 1");
}

// --- 4 -------------------------------------------------------------------

void analytic_empirical_agreement(Outcome& o) {
  // Instances whose eigenvalues sit at least 1e-3 from the imaginary axis,
  // half of them Unstable; see support/chain_instances.hpp.
  const auto cases = testing::agreement_cases(2024, 20, 1e-3);
  o.check(cases.size() == 20, std::to_string(cases.size()) + " instances drawn");
  std::size_t agree = 0, unstable = 0;
  for (const auto& c : cases) {
    const bool expect = c.verdict == Verdict::Unstable;
    unstable += expect;
    agree += c.simulated_diverged == expect;
    if (c.simulated_diverged != expect)
      o.check(false, std::to_string(c.mrp.num_states()) + "-state chain, verdict " + stability::to_string(c.verdict) +
                         ", simulated " + (c.simulated_diverged ? "diverged" : "bounded"));
  }
  o.check(agree == cases.size(), std::to_string(agree) + "/" + std::to_string(cases.size()) + " agree (" +
                                     std::to_string(unstable) + " Unstable)");
}

// --- 5, 6 ------------------------------------------------------------------

oracle::TrueValueTable make_oracle(double epsilon) {
  const std::uint64_t steps = 100'000, sample = 200, rollouts = 200, seed = 1;
  const auto behavior = epsilon > 0.0 ? policies::PolicyKind::behavior(epsilon) : policies::PolicyKind::target();
  Rng rng(seed);
  const auto states = oracle::collect_states(steps, sample, behavior, rng);
  auto table = oracle::estimate_true_values(states, rollouts, seed);
  table.provenance.total_steps = steps;
  table.provenance.epsilon = epsilon;
  return table;
}

harness::ExperimentResult study(Method method, Mode mode, const std::vector<double>& alphas, std::uint64_t base_seed,
                                const oracle::TrueValueTable& table) {
  harness::ExperimentConfig cfg;
  cfg.method = method;
  cfg.mode = mode;
  cfg.alphas = alphas;
  cfg.episodes = 30'000;
  cfg.runs = 5;
  cfg.base_seed = base_seed;
  return harness::execute_experiment(cfg, table);
}

std::vector<double> mean_curve(const harness::ExperimentResult& r, double alpha) {
  std::vector<double> out;
  for (const auto& p : r.curve)
    if (p.alpha == alpha) out.push_back(p.mean_msve ? *p.mean_msve : NAN);
  return out;
}

std::string describe(const harness::BounceReport& b) {
  if (!b.applicable) return "not applicable (diverged)";
  return "min " + fmt(b.min_error) + ", final " + fmt(b.final_error) + ", ratio " + fmt(b.min_error / b.final_error, 4);
}

std::string tail_text(const harness::StudyRow& row) {
  return row.mean_tail_msve ? fmt(*row.mean_tail_msve) : std::string("n/a");
}

void on_policy_study(Outcome& o) {
  const std::vector<double> alphas{3e-4, 1e-3, 3e-3};
  const auto table = make_oracle(0.0);
  const auto td = study(Method::Td0, Mode::OnPolicy, alphas, 100, table);
  const auto etd = study(Method::Etd0, Mode::OnPolicy, alphas, 100, table);

  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto b = harness::detect_bounce(mean_curve(td, alphas[i]));
    o.check(b.applicable && b.bounce, "(a) TD bounce at alpha " + fmt(alphas[i]) + ": " + describe(b));
  }
  const auto b = harness::detect_bounce(mean_curve(etd, alphas.front()));
  o.check(b.applicable && !b.bounce, "(b) no ETD bounce at alpha " + fmt(alphas.front()) + ": " + describe(b));

  // (c) best tail of each method over the step sizes where neither diverged.
  double best_td = INFINITY, best_etd = INFINITY;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& t = td.study[i];
    const auto& e = etd.study[i];
    o.notes.push_back("alpha " + fmt(alphas[i]) + ": TD tail " + tail_text(t) + " (" + std::to_string(t.diverged_runs) +
                      " diverged), ETD tail " + tail_text(e) + " (" + std::to_string(e.diverged_runs) + " diverged)");
    if (t.diverged_runs > 0 || e.diverged_runs > 0 || !t.mean_tail_msve || !e.mean_tail_msve) continue;
    best_td = std::min(best_td, *t.mean_tail_msve);
    best_etd = std::min(best_etd, *e.mean_tail_msve);
  }
  o.check(std::isfinite(best_etd) && best_etd < best_td,
          "(c) best common-alpha tail: ETD " + fmt(best_etd) + " < TD " + fmt(best_td));
}

void off_policy_study(Outcome& o) {
  const std::vector<double> alphas{1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  const auto table = make_oracle(harness::kOffPolicyEpsilon);
  const auto td = study(Method::Td0, Mode::OffPolicy, alphas, 200, table);
  const auto etd = study(Method::Etd0, Mode::OffPolicy, alphas, 200, table);

  std::set<double> td_conv, etd_conv;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& t = td.study[i];
    const auto& e = etd.study[i];
    if (t.diverged_runs == 0) td_conv.insert(alphas[i]);
    if (e.diverged_runs == 0) etd_conv.insert(alphas[i]);
    o.notes.push_back("alpha " + fmt(alphas[i]) + ": TD tail " + tail_text(t) + " (" + std::to_string(t.diverged_runs) +
                      "/5 diverged), ETD tail " + tail_text(e) + " (" + std::to_string(e.diverged_runs) + "/5 diverged)");
  }
  const bool subset = std::includes(td_conv.begin(), td_conv.end(), etd_conv.begin(), etd_conv.end());
  o.check(subset && td_conv.size() > etd_conv.size(),
          "(a) TD converges at " + std::to_string(td_conv.size()) + " step sizes, ETD at " +
              std::to_string(etd_conv.size()) + " (a subset)");

  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] < 1e-3) continue;
    const auto& t = td.study[i];
    const auto& e = etd.study[i];
    const bool worse = e.diverged_runs > 0 || !e.mean_tail_msve ||
                       (t.mean_tail_msve && *e.mean_tail_msve > *t.mean_tail_msve);
    o.check(worse, "(b) ETD at alpha " + fmt(alphas[i]) + " diverges or trails TD");
  }
  const double small = alphas.front();
  const auto curve = mean_curve(etd, small);
  const auto b = harness::detect_bounce(curve);
  o.check(etd.study.front().diverged_runs == 0 && b.applicable && !b.bounce && b.final_error < curve.front(),
          "(b) ETD at alpha " + fmt(small) + " trends down without a bounce: first " + fmt(curve.front()) + ", " +
              describe(b));
}

// --- 7 -------------------------------------------------------------------

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
           return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
         });
}

void unit_invariants(Outcome& o) {
  const features::TileCoder coder{features::TileCodingConfig{}};
  const auto target = policies::PolicyKind::target();
  const auto behavior = policies::PolicyKind::behavior(harness::kOffPolicyEpsilon);

  // F_t = t + 1 on-policy for the first 1000 steps of an episode (episodes restart as needed).
  {
    Rng rng(1);
    auto st = learners::make_learner(coder.dimension(), 1e-6);
    learners::begin_episode(st);
    env::CarState s = env::mc_reset(rng);
    std::size_t t = 0;
    bool ok = true;
    for (std::size_t n = 0; n < 1000; ++n) {
      const auto tr = env::mc_step(s, policies::target_action(s));
      const auto phi = coder.encode(s);
      features::SparseFeatures next = coder.terminal();
      coder.encode_into(tr, next);
      learners::etd0_update(st, {phi, tr.reward, next, 1.0});
      ok = ok && st.followon == static_cast<double>(t + 1);
      ++t;
      if (tr.terminal) {
        learners::begin_episode(st);
        s = env::mc_reset(rng);
        t = 0;
      } else {
        s = tr.next;
      }
    }
    o.check(ok, "on-policy F_t = t + 1 exactly over 1000 steps");
  }

  // Off-policy ratios and tile-coder activity along a long behavior trajectory.
  {
    Rng rng(2);
    std::set<double> rhos;
    bool coder_ok = true;
    env::CarState s = env::mc_reset(rng);
    for (int n = 0; n < 200'000; ++n) {
      const auto a = policies::behavior_sample(behavior, s, rng);
      rhos.insert(policies::importance_ratio(s, a, behavior));
      const auto phi = coder.encode(s);
      coder_ok = coder_ok && phi.active().size() == 5 && phi.active().back() < 125;
      const auto tr = env::mc_step(s, a);
      s = tr.terminal ? env::mc_reset(rng) : tr.next;
    }
    Rng grid(3);
    for (int n = 0; n < 100'000; ++n) {
      const env::CarState x{env::kPositionMin + (env::kPositionMax - env::kPositionMin) * grid.uniform(),
                            env::kVelocityMin + (env::kVelocityMax - env::kVelocityMin) * grid.uniform()};
      const auto phi = coder.encode(x);
      coder_ok = coder_ok && phi.active().size() == 5 && phi.active().back() < 125;
    }
    for (double p : {env::kPositionMin, env::kPositionMax})
      for (double v : {env::kVelocityMin, env::kVelocityMax}) {
        const auto phi = coder.encode({p, v});
        coder_ok = coder_ok && phi.active().size() == 5 && phi.active().back() < 125;
      }
    o.check(rhos == std::set<double>{0.0, 15.0 / 14.0}, "off-policy rho takes exactly the values {0, 15/14}");
    o.check(coder_ok, "tile coder: always 5 distinct active indices < 125");
  }

  // ETD with F and rho forced to 1 is TD, bit for bit.
  {
    Rng rng(4);
    auto td = learners::make_learner(coder.dimension(), 3e-3);
    auto etd = learners::make_learner(coder.dimension(), 3e-3);
    env::CarState s = env::mc_reset(rng);
    for (int n = 0; n < 20'000; ++n) {
      const auto tr = env::mc_step(s, policies::target_action(s));
      const auto phi = coder.encode(s);
      features::SparseFeatures next = coder.terminal();
      coder.encode_into(tr, next);
      learners::td0_update(td, {phi, tr.reward, next, 1.0});
      learners::begin_episode(etd);
      learners::etd0_update(etd, {phi, tr.reward, next, 1.0});
      s = tr.terminal ? env::mc_reset(rng) : tr.next;
    }
    o.check(bitwise_equal(td.theta, etd.theta), "ETD == TD bit-exactly with F = rho = 1 over 20000 steps");
  }

  // Followon recursion against sum_k prod_{j=k}^{t-1} rho_j on behavior episodes of <= 20 steps.
  {
    Rng rng(5);
    double worst = 0.0;
    std::size_t episodes = 0;
    const features::SparseFeatures phi(2, {0}), next(2, {1});
    while (episodes < 2000) {
      // Random starts across the state space keep some episodes short.
      env::CarState s{-1.2 + 1.7 * rng.uniform(), -0.07 + 0.14 * rng.uniform()};
      std::vector<double> rho;
      auto st = learners::make_learner(2, 1e-12);
      learners::begin_episode(st);
      for (std::size_t t = 0; t < 20; ++t) {
        const auto a = policies::behavior_sample(behavior, s, rng);
        const double r = policies::importance_ratio(s, a, behavior);
        learners::etd0_update(st, {phi, 0.0, next, r});
        double closed = 0.0;
        for (std::size_t k = 0; k <= t; ++k) {
          double prod = 1.0;
          for (std::size_t j = k; j < t; ++j) prod *= rho[j];
          closed += prod;
        }
        worst = std::max(worst, std::abs(st.followon - closed) / closed);
        rho.push_back(r);
        const auto tr = env::mc_step(s, a);
        if (tr.terminal) break;
        s = tr.next;
      }
      ++episodes;
    }
    o.check(worst <= 1e-12, "followon matches its closed form on 2000 episodes (max rel. error " + fmt(worst) + ")");
  }

  // Oracle table round trip.
  {
    Rng rng(6);
    const auto states = oracle::collect_states(20'000, 100, behavior, rng);
    auto table = oracle::estimate_true_values(states, 5, 6);
    table.provenance.total_steps = 20'000;
    table.provenance.epsilon = 0.1;
    for (auto& e : table.entries) e.v_pi += 1.0 / 7.0;
    std::stringstream io;
    oracle::write_table(io, table);
    o.check(oracle::read_table(io) == table, "oracle table round-trips bit-exactly");
  }
}

}  // namespace

int main() {
  std::printf("etdlab %s acceptance suite\n", harness::code_version());
  criterion(1, "counterexample key matrix", 1.0, counterexample_key_matrix);
  criterion(2, "constant-lambda control", 1.0, constant_lambda_control);
  criterion(3, "empirical divergence on the counterexample", 5.0, empirical_divergence);
  criterion(4, "analytic/empirical agreement on random chains", 60.0, analytic_empirical_agreement);
  criterion(5, "on-policy desk-scale study", 1200.0, on_policy_study);
  criterion(6, "off-policy desk-scale study", 1200.0, off_policy_study);
  criterion(7, "unit invariants", 60.0, unit_invariants);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
