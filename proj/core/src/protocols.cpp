#include "spinxfer/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinxfer/errors.hpp"

namespace spinxfer {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::SequentialSwap: return "swap";
    case ProtocolKind::SpinCoupling: return "spin-coupling";
    case ProtocolKind::Adiabatic: return "adiabatic";
  }
  return "unknown";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "swap" || name == "sequential-swap") return ProtocolKind::SequentialSwap;
  if (name == "spin-coupling" || name == "spin_coupling") return ProtocolKind::SpinCoupling;
  if (name == "adiabatic") return ProtocolKind::Adiabatic;
  throw InputError("unknown protocol '" + std::string(name) +
                   "' (expected swap, spin-coupling or adiabatic)");
}

void ProtocolSpec::validate() const {
  if (!(adiabatic_c >= 1.0) || !std::isfinite(adiabatic_c)) {
    throw InputError("adiabatic_c must be >= 1");
  }
  if (!(adiabatic_sigma_ratio > 0.0 && adiabatic_sigma_ratio < 0.5)) {
    throw InputError("adiabatic_sigma_ratio must lie in (0, 1/2)");
  }
}

double AdiabaticShape::odd(double t) const {
  const double x = (t - 0.5 * t_out + 2.0 * sigma_t) / (std::sqrt(2.0) * sigma_t);
  return 0.5 * j_max * (1.0 + std::erf(x));
}

double AdiabaticShape::even(double t) const {
  const double x = (t - 0.5 * t_out - 2.0 * sigma_t) / (std::sqrt(2.0) * sigma_t);
  return 0.5 * j_max * (1.0 - std::erf(x));
}

CouplingSchedule CouplingSchedule::piecewise(ProtocolKind kind, std::size_t n_sites,
                                             std::vector<ScheduleSegment> segments) {
  if (segments.empty()) {
    throw InputError("piecewise schedule needs at least one segment");
  }
  double t = 0.0;
  for (const auto& s : segments) {
    if (s.couplings.size() + 1 != n_sites) {
      throw InputError("segment coupling count does not match chain length");
    }
    if (s.t_begin != t || !(s.t_end > s.t_begin)) {
      throw InputError("schedule segments must be contiguous and start at t = 0");
    }
    t = s.t_end;
  }
  CouplingSchedule out;
  out.kind_ = kind;
  out.n_sites_ = n_sites;
  out.t_out_ = t;
  out.segments_ = std::move(segments);
  return out;
}

CouplingSchedule CouplingSchedule::smooth(std::size_t n_sites, AdiabaticShape shape) {
  if (!(shape.t_out > 0.0) || !(shape.sigma_t > 0.0)) {
    throw InputError("smooth schedule needs positive t_out and sigma_t");
  }
  CouplingSchedule out;
  out.kind_ = ProtocolKind::Adiabatic;
  out.n_sites_ = n_sites;
  out.t_out_ = shape.t_out;
  out.shape_ = shape;
  return out;
}

void CouplingSchedule::couplings_at(double t, std::span<double> out) const {
  if (out.size() + 1 != n_sites_) {
    throw InputError("coupling buffer size does not match chain length");
  }
  t = std::clamp(t, 0.0, t_out_);
  if (shape_) {
    const double odd = shape_->odd(t);
    const double even = shape_->even(t);
    // J_1 sits at index 0, so odd-numbered bonds have even indices.
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = (i % 2 == 0) ? odd : even;
    }
    return;
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const ScheduleSegment& s) { return v < s.t_end; });
  if (it == segments_.end()) --it;
  std::copy(it->couplings.begin(), it->couplings.end(), out.begin());
}

std::vector<double> CouplingSchedule::couplings_at(double t) const {
  std::vector<double> out(n_sites_ - 1);
  couplings_at(t, out);
  return out;
}

CouplingSchedule swap_schedule(const ChainConfig& config) {
  config.validate();
  const std::size_t bonds = config.n_sites - 1;
  const double pulse = kPi / (2.0 * config.j_max);
  std::vector<ScheduleSegment> segments;
  segments.reserve(bonds);
  for (std::size_t j = 0; j < bonds; ++j) {
    ScheduleSegment s;
    s.t_begin = static_cast<double>(j) * pulse;
    s.t_end = static_cast<double>(j + 1) * pulse;
    s.couplings.assign(bonds, 0.0);
    s.couplings[j] = config.j_max;
    segments.push_back(std::move(s));
  }
  return CouplingSchedule::piecewise(ProtocolKind::SequentialSwap, config.n_sites,
                                     std::move(segments));
}

SpinCouplingProfile spin_coupling_profile(const ChainConfig& config) {
  config.validate();
  const auto n = static_cast<double>(config.n_sites);
  SpinCouplingProfile p;
  p.j0 = (config.n_sites % 2 == 0) ? 2.0 * config.j_max / n
                                   : 2.0 * config.j_max / std::sqrt(n * n - 1.0);
  p.couplings.resize(config.n_sites - 1);
  for (std::size_t j = 1; j < config.n_sites; ++j) {
    const auto jd = static_cast<double>(j);
    p.couplings[j - 1] = p.j0 * std::sqrt(jd * (n - jd));
  }
  return p;
}

CouplingSchedule spin_coupling_schedule(const ChainConfig& config) {
  auto profile = spin_coupling_profile(config);
  ScheduleSegment s;
  s.t_begin = 0.0;
  s.t_end = kPi / (2.0 * profile.j0);
  s.couplings = std::move(profile.couplings);
  return CouplingSchedule::piecewise(ProtocolKind::SpinCoupling, config.n_sites, {std::move(s)});
}

StateVector analytic_spin_coupling_amplitudes(const ChainConfig& config, double t) {
  config.validate();
  if (!(t >= 0.0)) {
    throw InputError("time must be non-negative");
  }
  const double j0 = spin_coupling_profile(config).j0;
  const double s = std::sin(j0 * t);
  const double c = std::cos(j0 * t);
  const std::size_t n = config.n_sites;
  const int m = static_cast<int>(n) - 1;

  // |A_j| = sqrt(C(m, k)) |s|^k |c|^(m-k) with k = j - 1, evaluated in logs
  // so that large chains do not overflow the binomial.
  const double log_s = std::log(std::abs(s));
  const double log_c = std::log(std::abs(c));
  const Complex minus_i(0.0, -1.0);
  std::vector<Complex> a(n);
  for (int k = 0; k <= m; ++k) {
    const int rest = m - k;
    if ((k > 0 && s == 0.0) || (rest > 0 && c == 0.0)) {
      a[k] = 0.0;
      continue;
    }
    const double log_binom =
        std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(rest + 1.0);
    double log_mag = 0.5 * log_binom;
    if (k > 0) log_mag += k * log_s;
    if (rest > 0) log_mag += rest * log_c;
    double sign = 1.0;
    if (s < 0.0 && k % 2 == 1) sign = -sign;
    if (c < 0.0 && rest % 2 == 1) sign = -sign;
    Complex phase = 1.0;
    switch (k % 4) {
      case 1: phase = minus_i; break;
      case 2: phase = -1.0; break;
      case 3: phase = -minus_i; break;
      default: break;
    }
    a[k] = sign * std::exp(log_mag) * phase;
  }
  // The binomial identity makes this unit norm; renormalize away the last
  // few ulps so the StateVector invariant holds for any N.
  double n2 = 0.0;
  for (const auto& v : a) n2 += std::norm(v);
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& v : a) v *= scale;
  return StateVector(std::move(a));
}

CouplingSchedule adiabatic_schedule(const ChainConfig& config, const ProtocolSpec& spec) {
  config.validate();
  spec.validate();
  if (config.n_sites < 3 || config.n_sites % 2 == 0) {
    throw InputError("adiabatic protocol requires an odd chain length N >= 3 (the zero-energy "
                     "dark state exists only for odd N), got N = " +
                     std::to_string(config.n_sites));
  }
  AdiabaticShape shape;
  shape.j_max = config.j_max;
  shape.t_out = spec.adiabatic_c * static_cast<double>(config.n_sites) / config.j_max;
  shape.sigma_t = spec.adiabatic_sigma_ratio * shape.t_out;
  return CouplingSchedule::smooth(config.n_sites, shape);
}

CouplingSchedule make_schedule(const ChainConfig& config, const ProtocolSpec& spec) {
  switch (spec.kind) {
    case ProtocolKind::SequentialSwap: return swap_schedule(config);
    case ProtocolKind::SpinCoupling: return spin_coupling_schedule(config);
    case ProtocolKind::Adiabatic: return adiabatic_schedule(config, spec);
  }
  throw InputError("unknown protocol kind");
}

StateVector dark_state(std::span<const double> couplings) {
  const std::size_t n = couplings.size() + 1;
  if (n < 3 || n % 2 == 0) {
    throw InputError("dark state requires an odd number of sites >= 3");
  }
  // Component on site 2m+1 (one-based) is (-1)^m * prod_{odd k < 2m+1} J_k
  // * prod_{even k > 2m+1} J_k. Work with log-magnitudes and signs.
  const std::size_t half = (n - 1) / 2;
  std::vector<double> log_mag(half + 1, 0.0);
  std::vector<double> sign(half + 1, 1.0);
  auto coupling = [&](std::size_t k) { return couplings[k - 1]; };  // one-based bond
  for (std::size_t m = 0; m <= half; ++m) {
    const std::size_t site = 2 * m + 1;
    double lm = 0.0;
    double sg = (m % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t k = 1; k < site; k += 2) {
      const double jk = coupling(k);
      lm += std::log(std::abs(jk));
      if (jk < 0.0) sg = -sg;
    }
    for (std::size_t k = site + 1; k < n; k += 2) {
      const double jk = coupling(k);
      lm += std::log(std::abs(jk));
      if (jk < 0.0) sg = -sg;
    }
    log_mag[m] = lm;
    sign[m] = sg;
  }
  const double top = *std::max_element(log_mag.begin(), log_mag.end());
  if (!std::isfinite(top)) {
    throw DegenerateInputError("dark state undefined: every coupling product vanishes");
  }
  std::vector<Complex> a(n);
  double n2 = 0.0;
  for (std::size_t m = 0; m <= half; ++m) {
    const double v = sign[m] * std::exp(log_mag[m] - top);
    a[2 * m] = v;
    n2 += v * v;
  }
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& v : a) v *= scale;
  return StateVector(std::move(a));
}

}  // namespace spinxfer
