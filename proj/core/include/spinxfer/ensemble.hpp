#pragma once

// Monte Carlo averaging over disorder realizations and parameter sweeps.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spinxfer/chain.hpp"
#include "spinxfer/disorder.hpp"
#include "spinxfer/propagator.hpp"
#include "spinxfer/protocols.hpp"

namespace spinxfer {

struct ExperimentConfig {
  ChainConfig chain;
  ProtocolSpec protocol;
  DisorderSpec disorder;
  std::size_t realizations = 1000;
  std::uint64_t seed = 42;
  PropagationSettings settings;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

struct EnsembleStats {
  double mean_probability = 0.0;
  double mean_fidelity = 0.0;
  double std_probability = 0.0;
  double std_fidelity = 0.0;
  double stderr_probability = 0.0;
  double stderr_fidelity = 0.0;
  std::size_t count = 0;

  bool operator==(const EnsembleStats&) const = default;
};

/// Mean, sample standard deviation and standard error of per-realization
/// probabilities and fidelities, summed in index order.
EnsembleStats aggregate(std::span<const TransferResult> results);

struct EnsembleOptions {
  /// Worker threads; 0 means default_thread_count().
  unsigned threads = 0;
};

/// SPINXFER_THREADS if set to a positive integer, else hardware concurrency.
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on `threads` workers. The first
/// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

/// Single disorder realization of one experiment.
TransferResult run_realization(const ExperimentConfig& config, const CouplingSchedule& schedule,
                               std::uint64_t index);

/// Per-realization results in index order.
std::vector<TransferResult> run_realizations(const ExperimentConfig& config,
                                             const EnsembleOptions& options = {});

EnsembleStats run_point(const ExperimentConfig& config, const EnsembleOptions& options = {});

struct SweepGrid {
  std::vector<double> sigma_h{0.0};
  std::vector<double> sigma_j{0.0};
  std::vector<std::size_t> n_sites{25};
  std::vector<ProtocolKind> protocols{ProtocolKind::SpinCoupling};

  void validate() const;
  std::size_t size() const noexcept {
    return sigma_h.size() * sigma_j.size() * n_sites.size() * protocols.size();
  }
  bool operator==(const SweepGrid&) const = default;
};

struct SweepRow {
  ProtocolKind protocol = ProtocolKind::SpinCoupling;
  std::size_t n_sites = 0;
  double sigma_h = 0.0;
  double sigma_j = 0.0;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  EnsembleStats stats;

  bool operator==(const SweepRow&) const = default;
};

/// Seed of one grid point, derived from the master seed and the point's
/// coordinates only.
std::uint64_t point_seed(std::uint64_t master, ProtocolKind protocol, std::size_t n_sites,
                         double sigma_h, double sigma_j);

/// Experiment for one grid point: `base` with the coordinates and the
/// derived seed substituted.
ExperimentConfig point_config(const ExperimentConfig& base, ProtocolKind protocol,
                              std::size_t n_sites, double sigma_h, double sigma_j);

/// Evaluates the Cartesian product ordered protocol, N, sigma_h, sigma_j
/// (last varies fastest).
std::vector<SweepRow> run_sweep(const SweepGrid& grid, const ExperimentConfig& base,
                                const EnsembleOptions& options = {});

}  // namespace spinxfer
