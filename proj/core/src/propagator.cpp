#include "spinxfer/propagator.hpp"

#include <cmath>
#include <string>

#include "spinxfer/errors.hpp"

namespace spinxfer {

void PropagationSettings::validate() const {
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) {
    throw InputError("dt_max must be positive");
  }
  if (trajectory_stride == 0) {
    throw InputError("trajectory_stride must be positive");
  }
}

std::size_t step_count(double duration, double dt_max) {
  if (!(duration > 0.0)) return 0;
  auto n = static_cast<std::size_t>(std::ceil(duration / dt_max));
  if (n == 0) n = 1;
  while (duration / static_cast<double>(n) > dt_max) ++n;
  return n;
}

void apply_evolution(const Eigensystem& eig, double t, std::span<Complex> psi) {
  const auto n = eig.values.size();
  Eigen::Map<Eigen::VectorXcd> v(psi.data(), n);
  Eigen::VectorXcd c = eig.vectors.transpose() * v;
  for (Eigen::Index k = 0; k < n; ++k) {
    c[k] *= std::polar(1.0, -eig.values[k] * t);
  }
  v.noalias() = eig.vectors * c;
}

StateVector propagate_static(const SingleExcitationHamiltonian& h, const StateVector& psi0,
                             double t) {
  if (psi0.size() != h.size()) {
    throw InputError("state and Hamiltonian dimensions differ");
  }
  if (!(t >= 0.0)) {
    throw InputError("propagation time must be non-negative");
  }
  std::vector<Complex> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
  if (t > 0.0) {
    apply_evolution(eigensystem(h), t, psi);
  }
  return StateVector(std::move(psi));
}

void apply_taylor_step(TridiagonalView h, double dt, std::span<Complex> psi,
                       std::span<Complex> scratch) {
  const std::size_t n = h.size();
  std::span<Complex> term = scratch.subspan(0, n);
  std::span<Complex> next = scratch.subspan(n, n);
  std::copy(psi.begin(), psi.end(), term.begin());
  // Terms shrink at least geometrically once k > |H| dt; stop when the next
  // correction is below double resolution of a unit vector.
  constexpr double kStop = 1e-34;  // squared norm of the last term
  constexpr int kMaxTerms = 60;
  for (int k = 1; k <= kMaxTerms; ++k) {
    h.apply(term, next);
    // term = (-i dt / k) * next, spelled out to avoid the generic complex
    // multiply with its NaN handling.
    const double a = dt / k;
    double n2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      term[j] = Complex(a * next[j].imag(), -a * next[j].real());
      psi[j] += term[j];
      n2 += std::norm(term[j]);
    }
    if (n2 < kStop) break;
  }
}

namespace {

void check_dimensions(const CouplingSchedule& schedule, const DisorderRealization& realization,
                      const StateVector& psi0) {
  const std::size_t n = schedule.n_sites();
  if (realization.onsite.size() != n || realization.coupling_factors.size() + 1 != n) {
    throw InputError("disorder realization has " + std::to_string(realization.onsite.size()) +
                     " sites but the schedule has " + std::to_string(n));
  }
  if (psi0.size() != n) {
    throw InputError("initial state has " + std::to_string(psi0.size()) +
                     " sites but the schedule has " + std::to_string(n));
  }
}

std::vector<double> disordered(std::span<const double> nominal,
                               std::span<const double> factors) {
  std::vector<double> out(nominal.size());
  for (std::size_t j = 0; j < nominal.size(); ++j) out[j] = nominal[j] * factors[j];
  return out;
}

class Recorder {
 public:
  explicit Recorder(bool enabled) : enabled_(enabled) {}

  void record(double t, std::span<const Complex> psi) {
    if (!enabled_) return;
    trajectory_.times.push_back(t);
    trajectory_.states.emplace_back(std::vector<Complex>(psi.begin(), psi.end()));
  }

  std::optional<Trajectory> finish() {
    if (!enabled_) return std::nullopt;
    return std::move(trajectory_);
  }

 private:
  bool enabled_;
  Trajectory trajectory_;
};

void propagate_piecewise(const CouplingSchedule& schedule, const DisorderRealization& realization,
                         const PropagationSettings& settings, std::vector<Complex>& psi,
                         Recorder& recorder) {
  const double sample_dt = settings.dt_max * static_cast<double>(settings.trajectory_stride);
  for (const auto& segment : schedule.segments()) {
    const SingleExcitationHamiltonian h(realization.onsite,
                                        disordered(segment.couplings, realization.coupling_factors));
    const Eigensystem eig = eigensystem(h);
    if (settings.record_trajectory) {
      auto m = static_cast<std::size_t>(std::floor(segment.t_begin / sample_dt)) + 1;
      for (;; ++m) {
        const double t = static_cast<double>(m) * sample_dt;
        if (!(t < segment.t_end)) break;
        if (t <= segment.t_begin) continue;
        std::vector<Complex> sample = psi;
        apply_evolution(eig, t - segment.t_begin, sample);
        recorder.record(t, sample);
      }
    }
    apply_evolution(eig, segment.t_end - segment.t_begin, psi);
    recorder.record(segment.t_end, psi);
  }
}

void propagate_smooth(const CouplingSchedule& schedule, const DisorderRealization& realization,
                      const PropagationSettings& settings, std::vector<Complex>& psi,
                      Recorder& recorder) {
  const std::size_t n = schedule.n_sites();
  const std::size_t steps = step_count(schedule.t_out(), settings.dt_max);
  const double dt = schedule.t_out() / static_cast<double>(steps);

  std::vector<double> couplings(n - 1);
  std::vector<Complex> scratch(2 * n);
  const TridiagonalView h{realization.onsite, couplings};

  for (std::size_t k = 0; k < steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * dt;
    schedule.couplings_at(t_mid, couplings);
    for (std::size_t j = 0; j + 1 < n; ++j) couplings[j] *= realization.coupling_factors[j];

    if (settings.step_exponential == StepExponential::Taylor && h.norm_bound() * dt <= 1.0) {
      apply_taylor_step(h, dt, psi, scratch);
    } else {
      apply_evolution(eigensystem(h), dt, psi);
    }
    if ((k + 1) % settings.trajectory_stride == 0 || k + 1 == steps) {
      recorder.record(static_cast<double>(k + 1) * dt, psi);
    }
  }
}

}  // namespace

PropagationOutput propagate_schedule(const CouplingSchedule& schedule,
                                     const DisorderRealization& realization,
                                     const StateVector& psi0, const PropagationSettings& settings) {
  settings.validate();
  check_dimensions(schedule, realization, psi0);

  std::vector<Complex> psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
  Recorder recorder(settings.record_trajectory);
  recorder.record(0.0, psi);

  if (schedule.is_piecewise_constant()) {
    propagate_piecewise(schedule, realization, settings, psi, recorder);
  } else {
    propagate_smooth(schedule, realization, settings, psi, recorder);
  }
  return {StateVector(std::move(psi)), recorder.finish()};
}

}  // namespace spinxfer
