#include "spinxfer/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <sstream>

#include "spinxfer/chain.hpp"
#include "spinxfer/disorder.hpp"
#include "spinxfer/ensemble.hpp"
#include "spinxfer/propagator.hpp"
#include "spinxfer/protocols.hpp"

namespace spinxfer {

namespace {

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

TransferResult noiseless_transfer(std::size_t n, const ProtocolSpec& spec,
                                  const PropagationSettings& settings = {}) {
  const ChainConfig chain{n, 1.0};
  const auto schedule = make_schedule(chain, spec);
  const auto out = propagate_schedule(schedule, DisorderRealization::none(n),
                                      StateVector::basis(n, 0), settings);
  return make_transfer_result(out.final_state.last(), protocol_phase(n));
}

ExperimentConfig mc_point(const VerifyOptions& o, ProtocolKind kind, double sigma_h,
                          double sigma_j) {
  ExperimentConfig base;
  base.chain = {25, 1.0};
  base.realizations = o.realizations;
  base.seed = o.seed;
  return point_config(base, kind, 25, sigma_h, sigma_j);
}

EnsembleStats mc_stats(const VerifyOptions& o, ProtocolKind kind, double sigma_h,
                       double sigma_j, unsigned threads) {
  return run_point(mc_point(o, kind, sigma_h, sigma_j), {threads});
}

constexpr ProtocolKind kSwap = ProtocolKind::SequentialSwap;
constexpr ProtocolKind kSpin = ProtocolKind::SpinCoupling;
constexpr ProtocolKind kAdiabatic = ProtocolKind::Adiabatic;

CriterionResult noiseless_perfect_transfer(const VerifyOptions&) {
  const auto start = Clock::now();
  double worst_prob = 1.0;
  double worst_phase = 0.0;
  for (const std::size_t n : {15u, 25u, 51u}) {
    for (const auto kind : {kSwap, kSpin}) {
      ProtocolSpec spec;
      spec.kind = kind;
      const auto r = noiseless_transfer(n, spec);
      worst_prob = std::min(worst_prob, r.probability);
      worst_phase = std::max(worst_phase, circular_distance(r.phase, protocol_phase(n)));
    }
  }
  const double elapsed = seconds_since(start);
  CriterionResult res;
  res.passed = worst_prob >= 1.0 - 1e-9 && worst_phase <= 1e-8 && elapsed < 1.0;
  res.detail = fmt("min P = 1 - %.2e, max phase error = %.2e rad, %.3f s", 1.0 - worst_prob,
                   worst_phase, elapsed);
  return res;
}

CriterionResult noiseless_adiabatic_transfer(const VerifyOptions&) {
  ProtocolSpec spec;
  spec.kind = kAdiabatic;
  spec.adiabatic_c = 8.0;
  spec.adiabatic_sigma_ratio = 1.0 / 8.0;
  const auto c8 = noiseless_transfer(25, spec);
  spec.adiabatic_c = 16.0;
  const auto c16 = noiseless_transfer(25, spec);
  CriterionResult res;
  res.passed = c8.probability >= 0.99 && (1.0 - c16.fidelity) < (1.0 - c8.fidelity);
  res.detail = fmt("C=8: P = %.6f, 1-F = %.3e; C=16: P = %.6f, 1-F = %.3e", c8.probability,
                   1.0 - c8.fidelity, c16.probability, 1.0 - c16.fidelity);
  return res;
}

CriterionResult transfer_probabilities_under_disorder(const VerifyOptions& o) {
  struct Target {
    ProtocolKind kind;
    double expected;
  };
  CriterionResult res;
  res.passed = true;
  for (const auto [kind, expected] : {Target{kSwap, 0.20}, Target{kSpin, 0.42},
                                      Target{kAdiabatic, 0.96}}) {
    const auto s = mc_stats(o, kind, 0.15, 0.15, o.threads);
    const bool ok = std::abs(s.mean_probability - expected) <= 0.05;
    res.passed = res.passed && ok;
    res.detail += fmt("%s%s <P> = %.4f +- %.4f (target %.2f +- 0.05)%s",
                      res.detail.empty() ? "" : "; ", std::string(to_string(kind)).c_str(),
                      s.mean_probability, s.stderr_probability, expected, ok ? "" : " FAIL");
  }
  return res;
}

CriterionResult adiabatic_fidelity_collapse(const VerifyOptions& o) {
  const auto weak = mc_stats(o, kAdiabatic, 0.1, 0.0, o.threads);
  const auto strong = mc_stats(o, kAdiabatic, 0.25, 0.25, o.threads);
  const bool f_ok = std::abs(weak.mean_fidelity - 0.66) <= 0.03;
  const bool p_ok = weak.mean_probability > 0.9;
  const bool strong_ok = strong.mean_probability > 0.9;
  CriterionResult res;
  res.passed = f_ok && p_ok && strong_ok;
  res.detail = fmt("sigma_h=0.1: <F> = %.4f +- %.4f (target 0.66 +- 0.03)%s, <P> = %.4f%s; "
                   "sigma_h=sigma_J=0.25: <P> = %.4f +- %.4f (need > 0.9)%s",
                   weak.mean_fidelity, weak.stderr_fidelity, f_ok ? "" : " FAIL",
                   weak.mean_probability, p_ok ? "" : " FAIL", strong.mean_probability,
                   strong.stderr_probability, strong_ok ? "" : " FAIL");
  return res;
}

CriterionResult fidelity_formula_limits(const VerifyOptions& o) {
  const double f_zero = mean_fidelity(Complex(0.0, 0.0), 0.0);
  std::mt19937_64 gen(o.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  constexpr int kDraws = 100000;
  double sum = 0.0;
  for (int i = 0; i < kDraws; ++i) sum += mean_fidelity(std::polar(1.0, phase(gen)), 0.0);
  const double avg = sum / kDraws;
  CriterionResult res;
  res.passed = f_zero == 0.5 && std::abs(avg - 2.0 / 3.0) <= 0.002;
  res.detail = fmt("F(|A_N|=0) = %.17g; random-phase average = %.5f (2/3 +- 0.002)", f_zero, avg);
  return res;
}

CriterionResult spectral_identities(const VerifyOptions&) {
  const auto start = Clock::now();
  double worst_spacing = 0.0;
  double worst_cosine = 0.0;
  for (std::size_t n = 2; n <= 101; ++n) {
    const ChainConfig chain{n, 1.0};
    const auto profile = spin_coupling_profile(chain);
    const auto ev = spectrum(build_hamiltonian(chain, std::vector<double>(n, 0.0),
                                               profile.couplings));
    for (std::size_t k = 0; k + 1 < n; ++k) {
      worst_spacing = std::max(worst_spacing, std::abs((ev[k + 1] - ev[k]) - 2.0 * profile.j0));
    }
    const double j = 1.0;
    const auto hom = spectrum(build_hamiltonian(chain, std::vector<double>(n, 0.0),
                                                std::vector<double>(n - 1, j)));
    for (std::size_t k = 1; k <= n; ++k) {
      const double expected = -2.0 * j * std::cos(static_cast<double>(k) * kPi / (n + 1.0));
      worst_cosine = std::max(worst_cosine, std::abs(hom[k - 1] - expected));
    }
  }
  const double elapsed = seconds_since(start);
  CriterionResult res;
  res.passed = worst_spacing < 1e-10 && worst_cosine < 1e-10 && elapsed < 1.0;
  res.detail = fmt("max spacing deviation = %.2e, max cosine deviation = %.2e (N <= 101), %.3f s",
                   worst_spacing, worst_cosine, elapsed);
  return res;
}

CriterionResult oracle_equivalence(const VerifyOptions& o) {
  std::mt19937_64 gen(o.seed);
  const ChainConfig chain{25, 1.0};
  const auto profile = spin_coupling_profile(chain);
  const auto h = build_hamiltonian(chain, std::vector<double>(25, 0.0), profile.couplings);
  const double t_out = spin_coupling_schedule(chain).t_out();
  const auto eig = eigensystem(h);
  std::uniform_real_distribution<double> time(0.0, 2.0 * t_out);
  double worst_amp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = time(gen);
    std::vector<Complex> psi(25);
    psi[0] = 1.0;
    apply_evolution(eig, t, psi);
    const auto exact = analytic_spin_coupling_amplitudes(chain, t);
    for (std::size_t j = 0; j < 25; ++j) worst_amp = std::max(worst_amp, std::abs(psi[j] - exact[j]));
  }

  std::uniform_int_distribution<std::size_t> half(1, 25);
  std::uniform_real_distribution<double> coupling(0.05, 1.0);
  double worst_residual = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 * half(gen) + 1;
    std::vector<double> j(n - 1);
    for (auto& v : j) v = coupling(gen);
    const auto v = dark_state(j);
    const SingleExcitationHamiltonian hd(std::vector<double>(n, 0.0), j);
    std::vector<Complex> hv(n);
    hd.apply(v.amplitudes(), hv);
    double r2 = 0.0;
    for (const auto& x : hv) r2 += std::norm(x);
    worst_residual = std::max(worst_residual, std::sqrt(r2));
  }
  CriterionResult res;
  res.passed = worst_amp < 1e-8 && worst_residual < 1e-10;
  res.detail = fmt("binomial closed form max |dA| = %.2e; dark state max |H v| = %.2e", worst_amp,
                   worst_residual);
  return res;
}

CriterionResult numerical_hygiene(const VerifyOptions&) {
  ProtocolSpec spec;
  spec.kind = kAdiabatic;
  const ChainConfig long_chain{51, 1.0};
  PropagationSettings record;
  record.record_trajectory = true;
  record.trajectory_stride = 100;
  const auto out = propagate_schedule(adiabatic_schedule(long_chain, spec),
                                      DisorderRealization::none(51), StateVector::basis(51, 0),
                                      record);
  double drift = std::abs(out.final_state.norm() - 1.0);
  for (const auto& s : out.trajectory->states) drift = std::max(drift, std::abs(s.norm() - 1.0));

  // Successive-halving differences of P on N = 25; slope of log|d| vs log dt.
  const ChainConfig chain{25, 1.0};
  const auto schedule = adiabatic_schedule(chain, spec);
  const std::vector<double> steps{0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<double> prob;
  for (const double dt : steps) {
    PropagationSettings s;
    s.dt_max = dt;
    const auto r = propagate_schedule(schedule, DisorderRealization::none(25),
                                      StateVector::basis(25, 0), s);
    prob.push_back(std::norm(r.final_state.last()));
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto m = static_cast<double>(steps.size() - 1);
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    const double x = std::log(steps[i]);
    const double y = std::log(std::abs(prob[i] - prob[i + 1]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CriterionResult res;
  res.passed = drift < 1e-9 && order >= 1.8 && order <= 2.2;
  res.detail = fmt("N=51 adiabatic norm drift = %.2e; midpoint convergence order = %.3f", drift,
                   order);
  return res;
}

CriterionResult fidelity_ordering(const VerifyOptions& o) {
  auto separated = [](const EnsembleStats& lo, const EnsembleStats& hi) {
    const double se = std::hypot(lo.stderr_fidelity, hi.stderr_fidelity);
    return hi.mean_fidelity - lo.mean_fidelity > 3.0 * se;
  };
  const auto swap_j = mc_stats(o, kSwap, 0.0, 0.15, o.threads);
  const auto spin_j = mc_stats(o, kSpin, 0.0, 0.15, o.threads);
  const auto adia_j = mc_stats(o, kAdiabatic, 0.0, 0.15, o.threads);
  const auto spin_h = mc_stats(o, kSpin, 0.15, 0.0, o.threads);
  const auto adia_h = mc_stats(o, kAdiabatic, 0.15, 0.0, o.threads);
  const bool off_diag = separated(swap_j, spin_j) && separated(spin_j, adia_j);
  const bool diag = separated(adia_h, spin_h);
  CriterionResult res;
  res.passed = off_diag && diag;
  res.detail = fmt("sigma_J=0.15: <F> swap %.4f < spin %.4f < adiabatic %.4f%s; "
                   "sigma_h=0.15: <F> adiabatic %.4f < spin %.4f%s",
                   swap_j.mean_fidelity, spin_j.mean_fidelity, adia_j.mean_fidelity,
                   off_diag ? "" : " FAIL", adia_h.mean_fidelity, spin_h.mean_fidelity,
                   diag ? "" : " FAIL");
  return res;
}

CriterionResult thread_determinism(const VerifyOptions& o) {
  CriterionResult res;
  res.passed = true;
  const unsigned k = std::max(2u, o.determinism_threads);
  for (const auto kind : {kSwap, kSpin, kAdiabatic}) {
    const auto one = mc_stats(o, kind, 0.15, 0.15, 1);
    const auto many = mc_stats(o, kind, 0.15, 0.15, k);
    const bool same = one == many;
    res.passed = res.passed && same;
    res.detail += fmt("%s%s: %s", res.detail.empty() ? "" : "; ",
                      std::string(to_string(kind)).c_str(), same ? "identical" : "DIFFERENT");
  }
  res.detail += fmt(" (1 vs %u threads)", k);
  return res;
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> criteria = {
      {1, "noiseless perfect transfer (swap, spin-coupling)", false, noiseless_perfect_transfer},
      {2, "noiseless adiabatic transfer", false, noiseless_adiabatic_transfer},
      {3, "transfer probabilities at sigma_h = sigma_J = 0.15", true,
       transfer_probabilities_under_disorder},
      {4, "adiabatic fidelity collapse under diagonal disorder", true,
       adiabatic_fidelity_collapse},
      {5, "fidelity formula limits", false, fidelity_formula_limits},
      {6, "spectral identities", false, spectral_identities},
      {7, "oracle equivalence", false, oracle_equivalence},
      {8, "numerical hygiene", false, numerical_hygiene},
      {9, "fidelity ordering under disorder", true, fidelity_ordering},
      {10, "determinism across thread counts", true, thread_determinism},
  };
  return criteria;
}

CriterionResult run_criterion(const Criterion& criterion, const VerifyOptions& options) {
  const auto start = Clock::now();
  CriterionResult res;
  try {
    res = criterion.run(options);
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("exception: ") + e.what();
  }
  res.id = criterion.id;
  res.name = criterion.name;
  res.seconds = seconds_since(start);
  return res;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream ss;
  ss << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail
     << fmt(" (%.2f s)", r.seconds);
  return ss.str();
}

}  // namespace spinxfer
