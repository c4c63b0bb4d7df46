#pragma once

// Coupling schedules for the three transfer protocols, plus closed-form
// reference states used as oracles.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinxfer/chain.hpp"

namespace spinxfer {

enum class ProtocolKind { SequentialSwap, SpinCoupling, Adiabatic };

std::string_view to_string(ProtocolKind kind);

/// Parses "swap", "spin-coupling" or "adiabatic".
ProtocolKind parse_protocol(std::string_view name);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::SpinCoupling;
  /// Adiabatic duration factor: t_out = C * N / j_max.
  double adiabatic_c = 8.0;
  /// Width of the erf switching ramps relative to t_out.
  double adiabatic_sigma_ratio = 0.125;

  void validate() const;

  bool operator==(const ProtocolSpec&) const = default;
};

/// Interval [t_begin, t_end) on which the nominal couplings are constant.
struct ScheduleSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<double> couplings;
};

/// Parameters of the erf-shaped counterintuitive pulse pair.
struct AdiabaticShape {
  double j_max = 1.0;
  double t_out = 0.0;
  double sigma_t = 0.0;

  /// Coupling applied to J_1, J_3, ... (switches on around t_out/2 - 2 sigma_t).
  double odd(double t) const;
  /// Coupling applied to J_2, J_4, ... (switches off around t_out/2 + 2 sigma_t).
  double even(double t) const;
};

/// Nominal (disorder-free) couplings J_j(t) over [0, t_out].
class CouplingSchedule {
 public:
  static CouplingSchedule piecewise(ProtocolKind kind, std::size_t n_sites,
                                    std::vector<ScheduleSegment> segments);
  static CouplingSchedule smooth(std::size_t n_sites, AdiabaticShape shape);

  ProtocolKind kind() const noexcept { return kind_; }
  std::size_t n_sites() const noexcept { return n_sites_; }
  double t_out() const noexcept { return t_out_; }

  bool is_piecewise_constant() const noexcept { return !shape_.has_value(); }
  const std::vector<ScheduleSegment>& segments() const noexcept { return segments_; }
  const std::optional<AdiabaticShape>& shape() const noexcept { return shape_; }

  /// Nominal couplings at time t; t is clamped to [0, t_out]. At a segment
  /// boundary the later segment wins, except at t_out itself.
  std::vector<double> couplings_at(double t) const;
  void couplings_at(double t, std::span<double> out) const;

 private:
  CouplingSchedule() = default;

  ProtocolKind kind_ = ProtocolKind::SpinCoupling;
  std::size_t n_sites_ = 0;
  double t_out_ = 0.0;
  std::vector<ScheduleSegment> segments_;
  std::optional<AdiabaticShape> shape_;
};

/// N-1 back-to-back pi/2 pulses of strength j_max.
CouplingSchedule swap_schedule(const ChainConfig& config);

struct SpinCouplingProfile {
  std::vector<double> couplings;
  double j0 = 0.0;
};

/// J_j = J0 sqrt(j (N - j)), with J0 chosen so the largest coupling is j_max.
SpinCouplingProfile spin_coupling_profile(const ChainConfig& config);
CouplingSchedule spin_coupling_schedule(const ChainConfig& config);

/// Closed-form amplitudes of the spin-coupling chain started on site 1.
StateVector analytic_spin_coupling_amplitudes(const ChainConfig& config, double t);

/// Requires odd n_sites >= 3.
CouplingSchedule adiabatic_schedule(const ChainConfig& config, const ProtocolSpec& spec);

/// Dispatches on spec.kind.
CouplingSchedule make_schedule(const ChainConfig& config, const ProtocolSpec& spec);

/// Zero-energy eigenstate of the h = 0 chain with the given couplings,
/// supported on odd sites only. Requires an odd number of sites.
StateVector dark_state(std::span<const double> couplings);

}  // namespace spinxfer
