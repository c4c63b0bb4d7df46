#include "spinxfer/disorder.hpp"

#include <cmath>
#include <random>

#include "spinxfer/errors.hpp"

namespace spinxfer {

void DisorderSpec::validate() const {
  if (!(sigma_h >= 0.0) || !std::isfinite(sigma_h)) {
    throw InputError("sigma_h must be a non-negative finite number");
  }
  if (!(sigma_j >= 0.0) || !std::isfinite(sigma_j)) {
    throw InputError("sigma_j must be a non-negative finite number");
  }
}

DisorderRealization DisorderRealization::none(std::size_t n_sites) {
  DisorderRealization r;
  r.onsite.assign(n_sites, 0.0);
  r.coupling_factors.assign(n_sites > 0 ? n_sites - 1 : 0, 1.0);
  return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

DisorderRealization sample_realization(const DisorderSpec& spec, const ChainConfig& config,
                                       std::uint64_t seed, std::uint64_t index) {
  spec.validate();
  config.validate();
  const std::size_t n = config.n_sites;
  auto r = DisorderRealization::none(n);
  if (spec.is_noiseless()) {
    return r;
  }

  std::mt19937_64 gen(stream_seed(seed, index));
  std::normal_distribution<double> normal(0.0, 1.0);

  // Draw order is fixed: interior sites, then bonds. Both channels always
  // consume their draws so enabling one does not shift the other.
  const double h_scale = spec.sigma_h * config.j_max;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double z = normal(gen);
    r.onsite[j] = h_scale == 0.0 ? 0.0 : h_scale * z;
  }
  for (auto& f : r.coupling_factors) {
    const double z = normal(gen);
    f = spec.sigma_j == 0.0 ? 1.0 : 1.0 + spec.sigma_j * z;
  }
  return r;
}

}  // namespace spinxfer
