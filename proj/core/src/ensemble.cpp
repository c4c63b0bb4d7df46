#include "spinxfer/ensemble.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "spinxfer/errors.hpp"

namespace spinxfer {

void ExperimentConfig::validate() const {
  chain.validate();
  protocol.validate();
  disorder.validate();
  settings.validate();
  if (realizations < 1) {
    throw InputError("realizations must be >= 1");
  }
  if (protocol.kind == ProtocolKind::Adiabatic && (chain.n_sites < 3 || chain.n_sites % 2 == 0)) {
    throw InputError("adiabatic protocol requires an odd chain length N >= 3 (the zero-energy "
                     "dark state exists only for odd N), got N = " +
                     std::to_string(chain.n_sites));
  }
}

EnsembleStats aggregate(std::span<const TransferResult> results) {
  EnsembleStats s;
  s.count = results.size();
  if (results.empty()) return s;
  const auto n = static_cast<double>(results.size());
  double sum_p = 0.0;
  double sum_f = 0.0;
  for (const auto& r : results) {
    sum_p += r.probability;
    sum_f += r.fidelity;
  }
  s.mean_probability = sum_p / n;
  s.mean_fidelity = sum_f / n;
  if (results.size() > 1) {
    double ss_p = 0.0;
    double ss_f = 0.0;
    for (const auto& r : results) {
      ss_p += (r.probability - s.mean_probability) * (r.probability - s.mean_probability);
      ss_f += (r.fidelity - s.mean_fidelity) * (r.fidelity - s.mean_fidelity);
    }
    s.std_probability = std::sqrt(ss_p / (n - 1.0));
    s.std_fidelity = std::sqrt(ss_f / (n - 1.0));
    s.stderr_probability = s.std_probability / std::sqrt(n);
    s.stderr_fidelity = s.std_fidelity / std::sqrt(n);
  }
  return s;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("SPINXFER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = default_thread_count();
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const auto workers = static_cast<std::size_t>(threads) < count ? threads : count;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();  // join
  if (error) std::rethrow_exception(error);
}

TransferResult run_realization(const ExperimentConfig& config, const CouplingSchedule& schedule,
                               std::uint64_t index) {
  try {
    const auto realization = sample_realization(config.disorder, config.chain, config.seed, index);
    PropagationSettings settings = config.settings;
    settings.record_trajectory = false;
    const auto out = propagate_schedule(schedule, realization,
                                        StateVector::basis(config.chain.n_sites, 0), settings);
    return make_transfer_result(out.final_state.last(), protocol_phase(config.chain.n_sites));
  } catch (const RealizationError&) {
    throw;
  } catch (const std::exception& e) {
    throw RealizationError(static_cast<std::size_t>(index), e.what());
  }
}

std::vector<TransferResult> run_realizations(const ExperimentConfig& config,
                                             const EnsembleOptions& options) {
  config.validate();
  const auto schedule = make_schedule(config.chain, config.protocol);
  std::vector<TransferResult> results(config.realizations);
  parallel_for(config.realizations, options.threads,
               [&](std::size_t i) { results[i] = run_realization(config, schedule, i); });
  return results;
}

EnsembleStats run_point(const ExperimentConfig& config, const EnsembleOptions& options) {
  const auto results = run_realizations(config, options);
  return aggregate(results);
}

void SweepGrid::validate() const {
  if (sigma_h.empty() || sigma_j.empty() || n_sites.empty() || protocols.empty()) {
    throw InputError("sweep grid axes must be non-empty");
  }
}

std::uint64_t point_seed(std::uint64_t master, ProtocolKind protocol, std::size_t n_sites,
                         double sigma_h, double sigma_j) {
  // +0.0 and -0.0 name the same grid point.
  if (sigma_h == 0.0) sigma_h = 0.0;
  if (sigma_j == 0.0) sigma_j = 0.0;
  std::uint64_t s = stream_seed(master, static_cast<std::uint64_t>(protocol));
  s = stream_seed(s, n_sites);
  s = stream_seed(s, std::bit_cast<std::uint64_t>(sigma_h));
  s = stream_seed(s, std::bit_cast<std::uint64_t>(sigma_j));
  return s;
}

ExperimentConfig point_config(const ExperimentConfig& base, ProtocolKind protocol,
                              std::size_t n_sites, double sigma_h, double sigma_j) {
  ExperimentConfig c = base;
  c.protocol.kind = protocol;
  c.chain.n_sites = n_sites;
  c.disorder.sigma_h = sigma_h;
  c.disorder.sigma_j = sigma_j;
  c.seed = point_seed(base.seed, protocol, n_sites, sigma_h, sigma_j);
  return c;
}

std::vector<SweepRow> run_sweep(const SweepGrid& grid, const ExperimentConfig& base,
                                const EnsembleOptions& options) {
  grid.validate();
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto protocol : grid.protocols) {
    for (const auto n : grid.n_sites) {
      for (const double sh : grid.sigma_h) {
        for (const double sj : grid.sigma_j) {
          const auto config = point_config(base, protocol, n, sh, sj);
          SweepRow row;
          row.protocol = protocol;
          row.n_sites = n;
          row.sigma_h = sh;
          row.sigma_j = sj;
          row.realizations = config.realizations;
          row.seed = config.seed;
          row.stats = run_point(config, options);
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

}  // namespace spinxfer
