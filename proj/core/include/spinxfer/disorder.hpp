#pragma once

// Static Gaussian disorder with counter-based, order-independent seeding.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spinxfer/chain.hpp"

namespace spinxfer {

struct DisorderSpec {
  double sigma_h = 0.0;  // on-site energies, units of j_max
  double sigma_j = 0.0;  // relative coupling error

  void validate() const;
  bool is_noiseless() const noexcept { return sigma_h == 0.0 && sigma_j == 0.0; }

  bool operator==(const DisorderSpec&) const = default;
};

/// One frozen draw of the disorder. The end sites never carry an on-site
/// energy.
struct DisorderRealization {
  std::vector<double> onsite;            // h_j, N entries
  std::vector<double> coupling_factors;  // 1 + dJ_j, N-1 entries

  static DisorderRealization none(std::size_t n_sites);
  std::size_t n_sites() const noexcept { return onsite.size(); }
};

/// Mixes a realization index into a master seed (SplitMix64 finalizer).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

/// Realization `index` of the stream `seed`; a pure function of its inputs.
DisorderRealization sample_realization(const DisorderSpec& spec, const ChainConfig& config,
                                       std::uint64_t seed, std::uint64_t index);

}  // namespace spinxfer
