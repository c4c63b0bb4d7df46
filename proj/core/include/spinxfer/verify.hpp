#pragma once

// Built-in acceptance checks, shared by `spinxfer verify` and the
// acceptance test binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spinxfer {

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::size_t realizations = 1000;
  unsigned threads = 0;              // 0: default_thread_count()
  unsigned determinism_threads = 4;  // K for the thread-count determinism check
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id = 0;
  std::string name;
  bool monte_carlo = false;  // needs full disorder ensembles (minutes)
  std::function<CriterionResult(const VerifyOptions&)> run;
};

/// All criteria in id order.
const std::vector<Criterion>& acceptance_criteria();

/// Runs one criterion, timing it and converting exceptions into failures.
CriterionResult run_criterion(const Criterion& criterion, const VerifyOptions& options);

/// "PASS [3] name: detail (1.23 s)"
std::string format_result(const CriterionResult& result);

}  // namespace spinxfer
