#pragma once

// Unitary evolution of single-excitation amplitudes.
//
// Static and piecewise-constant Hamiltonians are exponentiated exactly via
// their eigendecomposition. Smooth schedules use the exponential midpoint
// rule: each step of length dt applies exp(-i H(t + dt/2) dt).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spinxfer/chain.hpp"
#include "spinxfer/disorder.hpp"
#include "spinxfer/protocols.hpp"

namespace spinxfer {

/// How a single midpoint step exp(-i H dt) is evaluated.
enum class StepExponential {
  /// Taylor series summed to machine precision; falls back to kEigen when
  /// |H| dt is not small.
  Taylor,
  /// Full tridiagonal eigendecomposition at every step.
  Eigen,
};

struct PropagationSettings {
  double dt_max = 0.01;
  bool record_trajectory = false;
  std::size_t trajectory_stride = 1;
  StepExponential step_exponential = StepExponential::Taylor;

  void validate() const;
  bool operator==(const PropagationSettings&) const = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
};

struct PropagationOutput {
  StateVector final_state;
  std::optional<Trajectory> trajectory;
};

/// exp(-i H t) psi0 via eigendecomposition.
StateVector propagate_static(const SingleExcitationHamiltonian& h, const StateVector& psi0,
                             double t);

/// In-place exp(-i H t) using precomputed eigenpairs.
void apply_evolution(const Eigensystem& eig, double t, std::span<Complex> psi);

/// In-place exp(-i H dt) by Taylor series. Accurate to rounding when
/// h.norm_bound() * dt <= 1; `scratch` needs 2 * h.size() entries.
void apply_taylor_step(TridiagonalView h, double dt, std::span<Complex> psi,
                       std::span<Complex> scratch);

/// Number of equal steps of length <= dt_max covering `duration`.
std::size_t step_count(double duration, double dt_max);

/// Evolves psi0 over [0, t_out] of `schedule` with `realization` applied:
/// h_j added on-site, every nominal J_j(t) scaled by (1 + dJ_j).
PropagationOutput propagate_schedule(const CouplingSchedule& schedule,
                                     const DisorderRealization& realization,
                                     const StateVector& psi0, const PropagationSettings& settings);

}  // namespace spinxfer
