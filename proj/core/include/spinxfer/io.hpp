#pragma once

// Configuration files, run manifests, and CSV output.
//
// Configurations are JSON objects:
//
//   {
//     "chain":       {"n_sites": 25, "j_max": 1.0},
//     "protocol":    {"kind": "adiabatic", "adiabatic_c": 8.0,
//                     "adiabatic_sigma_ratio": 0.125},
//     "disorder":    {"sigma_h": 0.15, "sigma_j": 0.15},
//     "realizations": 1000,
//     "seed": 42,
//     "propagation": {"dt_max": 0.01, "step_exponential": "taylor"},
//     "sweep":       {"sigma_h": [...], "sigma_j": [...],
//                     "n_sites": [...], "protocols": [...]},  // optional
//     "trajectory":  {"noiseless": false, "index": 0}          // optional
//   }
//
// Missing keys keep their defaults. A manifest nests a full configuration
// under "config" and is accepted wherever a configuration is.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinxfer/ensemble.hpp"

namespace spinxfer {

/// Which single run a trajectory is recorded for.
struct TrajectoryRequest {
  bool noiseless = false;
  std::uint64_t index = 0;  // realization index when not noiseless

  bool operator==(const TrajectoryRequest&) const = default;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::optional<SweepGrid> sweep;
  std::optional<TrajectoryRequest> trajectory;

  bool operator==(const RunConfig&) const = default;
};

std::string serialize_config(const RunConfig& config);
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

struct RunManifest {
  RunConfig config;
  std::string command;  // CLI subcommand that produced the output
  std::string tool_version;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string timestamp;  // ISO 8601, UTC
};

std::string serialize_manifest(const RunManifest& manifest);
RunManifest parse_manifest(std::string_view text);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Path of the manifest written next to `output`.
std::filesystem::path manifest_path(const std::filesystem::path& output);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// CSV header, in column order.
std::span<const std::string_view> csv_columns();

/// Renders a double with 17 significant digits (round-trips exactly).
std::string format_double(double v);

void write_csv(std::span<const SweepRow> rows, std::ostream& out);
void write_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);

/// Parses CSV produced by write_csv. The standard deviations are not part
/// of the format and come back as zero; count equals realizations.
std::vector<SweepRow> read_csv(std::istream& in);

/// Time-resolved site populations |A_j(t)|^2, one row per snapshot. When
/// `schedule` is adiabatic, the nominal j_odd and j_even values (in units
/// of j_max) are appended.
void write_trajectory_csv(const Trajectory& trajectory, const CouplingSchedule& schedule,
                          std::ostream& out);

}  // namespace spinxfer
