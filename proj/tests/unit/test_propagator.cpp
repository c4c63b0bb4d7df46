#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spinxfer/disorder.hpp"
#include "spinxfer/errors.hpp"
#include "spinxfer/propagator.hpp"

namespace spinxfer {
namespace {

struct RandomChain {
  std::vector<double> onsite;
  std::vector<double> couplings;
};

RandomChain random_chain(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  RandomChain c{std::vector<double>(n), std::vector<double>(n - 1)};
  for (auto& v : c.onsite) v = 0.3 * normal(gen);
  for (auto& v : c.couplings) v = 1.0 + 0.2 * normal(gen);
  return c;
}

StateVector random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> a(n);
  double n2 = 0.0;
  for (auto& v : a) {
    v = {normal(gen), normal(gen)};
    n2 += std::norm(v);
  }
  for (auto& v : a) v /= std::sqrt(n2);
  return StateVector(std::move(a));
}

double transfer_probability(const CouplingSchedule& s, const DisorderRealization& r,
                            const PropagationSettings& settings = {}) {
  const auto out = propagate_schedule(s, r, StateVector::basis(s.n_sites(), 0), settings);
  return std::norm(out.final_state.last());
}

TEST(PropagateStatic, ZeroTimeIsIdentity) {
  const auto c = random_chain(6, 1);
  const auto h = build_hamiltonian({6, 1.0}, c.onsite, c.couplings);
  const auto psi = random_state(6, 2);
  const auto out = propagate_static(h, psi, 0.0);
  EXPECT_LT(oracle::max_abs_diff(out.amplitudes(), psi.amplitudes()), 1e-15);
}

TEST(PropagateStatic, TwoSiteRabiOscillation) {
  const double j = 0.8;
  const auto h = build_hamiltonian({2, 1.0}, {0.0, 0.0}, {j});
  for (double t : {0.1, 0.5, 1.0, kPi / (2.0 * j), 3.7}) {
    const auto out = propagate_static(h, StateVector::basis(2, 0), t);
    EXPECT_NEAR(std::norm(out.last()), std::pow(std::sin(j * t), 2), 1e-14);
    EXPECT_NEAR(std::abs(out.last() - Complex(0.0, -std::sin(j * t))), 0.0, 1e-14);
  }
}

TEST(PropagateStatic, MatchesDenseExponentialOnRandomChains) {
  for (std::size_t n : {2u, 5u, 25u, 51u}) {
    const auto c = random_chain(n, n);
    const auto h = build_hamiltonian({n, 1.0}, c.onsite, c.couplings);
    const auto psi = random_state(n, n + 100);
    for (double t : {0.3, 4.0, 25.0}) {
      const auto ref = oracle::evolve_dense(c.onsite, c.couplings, psi.amplitudes(), t);
      EXPECT_LT(oracle::max_abs_diff(propagate_static(h, psi, t).amplitudes(), ref), 1e-12)
          << "N=" << n << " t=" << t;
    }
  }
}

TEST(PropagateStatic, SpinCouplingChainMatchesClosedForm) {
  const ChainConfig cfg{25, 1.0};
  const auto p = spin_coupling_profile(cfg);
  const auto h = build_hamiltonian(cfg, std::vector<double>(25, 0.0), p.couplings);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 2.0 * spin_coupling_schedule(cfg).t_out());
  for (int i = 0; i < 100; ++i) {
    const double t = u(gen);
    const auto psi = propagate_static(h, StateVector::basis(25, 0), t);
    ASSERT_LT(oracle::max_abs_diff(psi.amplitudes(),
                                   analytic_spin_coupling_amplitudes(cfg, t).amplitudes()),
              1e-10)
        << t;
  }
}

TEST(PropagateStatic, RejectsBadArguments) {
  const auto h = build_hamiltonian({3, 1.0}, {0.0, 0.0, 0.0}, {1.0, 1.0});
  EXPECT_THROW(propagate_static(h, StateVector::basis(4, 0), 1.0), InputError);
  EXPECT_THROW(propagate_static(h, StateVector::basis(3, 0), -1.0), InputError);
}

TEST(TaylorStep, MatchesDenseExponential) {
  for (std::size_t n : {3u, 25u}) {
    const auto c = random_chain(n, 7 * n);
    const TridiagonalView view{c.onsite, c.couplings};
    const auto psi0 = random_state(n, 11);
    for (double dt : {1e-4, 0.01, 0.2, 0.9 / view.norm_bound()}) {
      std::vector<Complex> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
      std::vector<Complex> scratch(2 * n);
      apply_taylor_step(view, dt, psi, scratch);
      const auto ref = oracle::evolve_dense(c.onsite, c.couplings, psi0.amplitudes(), dt);
      EXPECT_LT(oracle::max_abs_diff(psi, ref), 1e-14) << "dt=" << dt;
    }
  }
}

TEST(StepCount, NeverExceedsMaximumStep) {
  EXPECT_EQ(step_count(0.0, 0.01), 0u);
  EXPECT_EQ(step_count(1.0, 0.5), 2u);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> d(0.01, 500.0);
  std::uniform_real_distribution<double> h(1e-3, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double duration = d(gen);
    const double dt = h(gen);
    const auto n = step_count(duration, dt);
    ASSERT_LE(duration / n, dt);
    if (n > 1) ASSERT_GT(duration / static_cast<double>(n - 1), dt * (1.0 - 1e-12));
  }
}

TEST(PropagationSettings, Validation) {
  PropagationSettings s;
  s.dt_max = 0.0;
  EXPECT_THROW(s.validate(), InputError);
  s.dt_max = -1.0;
  EXPECT_THROW(s.validate(), InputError);
  s = {};
  s.trajectory_stride = 0;
  EXPECT_THROW(s.validate(), InputError);
}

TEST(PropagateSchedule, DimensionMismatch) {
  const auto s = swap_schedule({5, 1.0});
  EXPECT_THROW(propagate_schedule(s, DisorderRealization::none(4), StateVector::basis(5, 0), {}),
               InputError);
  EXPECT_THROW(propagate_schedule(s, DisorderRealization::none(5), StateVector::basis(4, 0), {}),
               InputError);
}

TEST(PropagateSchedule, NoiselessSwapIsPerfect) {
  for (std::size_t n : {2u, 3u, 4u, 25u}) {
    const auto s = swap_schedule({n, 1.0});
    const auto out =
        propagate_schedule(s, DisorderRealization::none(n), StateVector::basis(n, 0), {});
    const Complex expected = std::pow(Complex(0.0, -1.0), static_cast<int>(n - 1));
    EXPECT_LT(std::abs(out.final_state.last() - expected), 1e-12) << n;
  }
}

TEST(PropagateSchedule, SwapWithCouplingErrorUnderRotates) {
  DisorderRealization r = DisorderRealization::none(2);
  r.coupling_factors[0] = 0.9;
  const double p = transfer_probability(swap_schedule({2, 1.0}), r);
  EXPECT_NEAR(p, std::pow(std::sin(0.9 * kPi / 2.0), 2), 1e-13);
  EXPECT_NEAR(p, 0.97553, 1e-5);
}

TEST(PropagateSchedule, PiecewiseEqualsProductOfStaticEvolutions) {
  const std::size_t n = 6;
  const auto s = swap_schedule({n, 1.0});
  const auto r = sample_realization({0.2, 0.2}, {n, 1.0}, 5, 0);
  const auto psi0 = random_state(n, 3);
  StateVector psi = psi0;
  for (const auto& seg : s.segments()) {
    std::vector<double> c = seg.couplings;
    for (std::size_t b = 0; b < c.size(); ++b) c[b] *= r.coupling_factors[b];
    psi = propagate_static(build_hamiltonian({n, 1.0}, r.onsite, c), psi, seg.t_end - seg.t_begin);
  }
  const auto out = propagate_schedule(s, r, psi0, {});
  EXPECT_LT(oracle::max_abs_diff(out.final_state.amplitudes(), psi.amplitudes()), 1e-12);
}

TEST(PropagateSchedule, IdleSitesFeelOnsiteDisorder) {
  // During the first pulse site 3 idles and only acquires the phase exp(-i h_3 t).
  const std::size_t n = 3;
  DisorderRealization r = DisorderRealization::none(n);
  const auto s = swap_schedule({n, 1.0});
  const auto one_pulse = CouplingSchedule::piecewise(ProtocolKind::SequentialSwap, n,
                                                     {s.segments().front()});
  r.onsite = {0.0, 0.0, 0.37};
  const auto out = propagate_schedule(one_pulse, r, StateVector::basis(n, 2), {});
  const double t = one_pulse.t_out();
  EXPECT_LT(std::abs(out.final_state.last() - std::polar(1.0, -0.37 * t)), 1e-14);
}

TEST(PropagateSchedule, TimeReversalRestoresInitialState) {
  const std::size_t n = 7;
  const auto s = swap_schedule({n, 1.0});
  const auto r = sample_realization({0.15, 0.15}, {n, 1.0}, 42, 3);
  const auto psi0 = random_state(n, 8);
  const auto forward = propagate_schedule(s, r, psi0, {}).final_state;
  // Reverse the pulse order and flip the sign of H.
  std::vector<ScheduleSegment> back;
  double t = 0.0;
  for (auto it = s.segments().rbegin(); it != s.segments().rend(); ++it) {
    std::vector<double> c = it->couplings;
    for (auto& v : c) v = -v;
    back.push_back({t, t + (it->t_end - it->t_begin), c});
    t = back.back().t_end;
  }
  DisorderRealization neg = r;
  for (auto& h : neg.onsite) h = -h;
  const auto reversed = CouplingSchedule::piecewise(ProtocolKind::SequentialSwap, n, back);
  const auto restored = propagate_schedule(reversed, neg, forward, {}).final_state;
  EXPECT_LT(oracle::max_abs_diff(restored.amplitudes(), psi0.amplitudes()), 1e-12);
}

TEST(PropagateSchedule, SmoothScheduleConservesNorm) {
  const std::size_t n = 51;
  const auto s = adiabatic_schedule({n, 1.0}, {ProtocolKind::Adiabatic, 2.0, 0.125});
  const auto r = sample_realization({0.2, 0.2}, {n, 1.0}, 1, 0);
  PropagationSettings settings;
  settings.record_trajectory = true;
  settings.trajectory_stride = 500;
  const auto out = propagate_schedule(s, r, StateVector::basis(n, 0), settings);
  ASSERT_TRUE(out.trajectory.has_value());
  for (const auto& psi : out.trajectory->states) EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
}

TEST(PropagateSchedule, TaylorAndEigenStepsAgree) {
  const std::size_t n = 25;
  const auto s = adiabatic_schedule({n, 1.0}, {ProtocolKind::Adiabatic, 8.0, 0.125});
  const auto r = sample_realization({0.15, 0.15}, {n, 1.0}, 42, 7);
  PropagationSettings taylor;
  PropagationSettings eigen;
  eigen.step_exponential = StepExponential::Eigen;
  const auto a = propagate_schedule(s, r, StateVector::basis(n, 0), taylor).final_state;
  const auto b = propagate_schedule(s, r, StateVector::basis(n, 0), eigen).final_state;
  EXPECT_LT(oracle::max_abs_diff(a.amplitudes(), b.amplitudes()), 1e-10);
}

TEST(PropagateSchedule, MidpointRuleIsSecondOrder) {
  const std::size_t n = 7;
  const auto s = adiabatic_schedule({n, 1.0}, {ProtocolKind::Adiabatic, 2.0, 0.125});
  const auto r = sample_realization({0.1, 0.1}, {n, 1.0}, 9, 0);
  auto final_state = [&](double dt) {
    PropagationSettings p;
    p.dt_max = dt;
    return propagate_schedule(s, r, StateVector::basis(n, 0), p).final_state;
  };
  const auto ref = final_state(0.002);
  const double e1 = oracle::max_abs_diff(final_state(0.2).amplitudes(), ref.amplitudes());
  const double e2 = oracle::max_abs_diff(final_state(0.1).amplitudes(), ref.amplitudes());
  const double e3 = oracle::max_abs_diff(final_state(0.05).amplitudes(), ref.amplitudes());
  const double order = std::log2(e1 / e2);
  EXPECT_GT(order, 1.8);
  EXPECT_LT(order, 2.2);
  EXPECT_GT(std::log2(e2 / e3), 1.8);
  EXPECT_LT(std::log2(e2 / e3), 2.2);
}

TEST(PropagateSchedule, NoiselessAdiabaticTransfer) {
  const auto s = adiabatic_schedule({25, 1.0}, {ProtocolKind::Adiabatic, 8.0, 0.125});
  EXPECT_GE(transfer_probability(s, DisorderRealization::none(25)), 0.99);
}

TEST(PropagateSchedule, AdiabaticTransferIsCappedByRampTails) {
  // The erf ramps never switch fully off, so the dark state overlaps the end
  // sites only partially at t = 0 and t_out. Slow runs settle near the product
  // of those overlaps; bright-state leakage of the same order interferes on
  // top, so lengthening the run does not push the transfer towards 1.
  const std::size_t n = 7;
  const ChainConfig cfg{n, 1.0};
  const auto s0 = adiabatic_schedule(cfg, {ProtocolKind::Adiabatic, 8.0, 0.125});
  const double start = std::norm(dark_state(s0.couplings_at(0.0))[0]);
  const double end = std::norm(dark_state(s0.couplings_at(s0.t_out())).last());
  const double limit = start * end;
  const double loss = 1.0 - limit;
  EXPECT_NEAR(loss, 2.0 * std::pow(std::erfc(std::sqrt(2.0)) / 2.0, 2), 1e-5);
  for (double c : {16.0, 32.0, 64.0, 128.0}) {
    const auto s = adiabatic_schedule(cfg, {ProtocolKind::Adiabatic, c, 0.125});
    const double p = transfer_probability(s, DisorderRealization::none(n));
    EXPECT_LT(std::abs(p - limit), 2.0 * loss) << "C=" << c;
    EXPECT_LT(p, 1.0 - 1e-4) << "C=" << c;
  }
}

TEST(PropagateSchedule, TrajectorySampling) {
  const std::size_t n = 5;
  PropagationSettings settings;
  settings.record_trajectory = true;
  settings.dt_max = 0.05;
  settings.trajectory_stride = 4;
  for (const auto& s : {swap_schedule({n, 1.0}), spin_coupling_schedule({n, 1.0}),
                        adiabatic_schedule({n, 1.0}, {ProtocolKind::Adiabatic, 2.0, 0.125})}) {
    const auto out = propagate_schedule(s, DisorderRealization::none(n), StateVector::basis(n, 0),
                                        settings);
    ASSERT_TRUE(out.trajectory.has_value());
    const auto& tr = *out.trajectory;
    ASSERT_EQ(tr.times.size(), tr.states.size());
    EXPECT_EQ(tr.times.front(), 0.0);
    EXPECT_NEAR(tr.times.back(), s.t_out(), 1e-12);
    for (std::size_t i = 1; i < tr.times.size(); ++i) ASSERT_GT(tr.times[i], tr.times[i - 1]);
    EXPECT_GT(tr.times.size(), s.t_out() / 0.2 - 2.0);
    EXPECT_LT(oracle::max_abs_diff(tr.states.back().amplitudes(), out.final_state.amplitudes()),
              1e-15);
  }
  EXPECT_FALSE(propagate_schedule(swap_schedule({n, 1.0}), DisorderRealization::none(n),
                                  StateVector::basis(n, 0), {})
                   .trajectory.has_value());
}

TEST(PropagateSchedule, PiecewiseTrajectoryMatchesStaticEvolution) {
  const std::size_t n = 4;
  PropagationSettings settings;
  settings.record_trajectory = true;
  settings.dt_max = 0.1;
  const auto s = spin_coupling_schedule({n, 1.0});
  const auto out =
      propagate_schedule(s, DisorderRealization::none(n), StateVector::basis(n, 0), settings);
  const ChainConfig cfg{n, 1.0};
  for (std::size_t i = 0; i < out.trajectory->times.size(); ++i) {
    const double t = out.trajectory->times[i];
    ASSERT_LT(oracle::max_abs_diff(out.trajectory->states[i].amplitudes(),
                                   analytic_spin_coupling_amplitudes(cfg, t).amplitudes()),
              1e-12);
  }
}

}  // namespace
}  // namespace spinxfer
