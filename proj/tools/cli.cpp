#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "spinxfer/ensemble.hpp"
#include "spinxfer/errors.hpp"
#include "spinxfer/io.hpp"
#include "spinxfer/verify.hpp"
#include "spinxfer/version.hpp"

namespace spinxfer::cli {

namespace {

constexpr std::size_t kTrajectoryRows = 500;

/// Flags shared by run, sweep and trajectory. A flag overrides the
/// configuration file only when it was given on the command line.
struct ExperimentFlags {
  std::string config_path;
  std::string protocol;
  std::size_t n_sites = 0;
  double j_max = 0.0;
  double sigma_h = 0.0;
  double sigma_j = 0.0;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  double dt_max = 0.0;
  double adiabatic_c = 0.0;
  double sigma_ratio = 0.0;
  std::string step_exponential;
  unsigned threads = 0;
  std::string output;

  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;

  void bind(CLI::App* app) {
    app->add_option("--config", config_path, "JSON configuration or manifest file")
        ->check(CLI::ExistingFile);
    add(app->add_option("--protocol", protocol, "swap | spin-coupling | adiabatic"),
        [this](RunConfig& c) { c.experiment.protocol.kind = parse_protocol(protocol); });
    add(app->add_option("--n", n_sites, "chain length N"),
        [this](RunConfig& c) { c.experiment.chain.n_sites = n_sites; });
    add(app->add_option("--j-max", j_max, "maximal coupling (sets the units)"),
        [this](RunConfig& c) { c.experiment.chain.j_max = j_max; });
    add(app->add_option("--sigma-h", sigma_h, "on-site disorder width, units of j_max"),
        [this](RunConfig& c) { c.experiment.disorder.sigma_h = sigma_h; });
    add(app->add_option("--sigma-j", sigma_j, "relative coupling disorder width"),
        [this](RunConfig& c) { c.experiment.disorder.sigma_j = sigma_j; });
    add(app->add_option("--realizations", realizations, "disorder realizations per point"),
        [this](RunConfig& c) { c.experiment.realizations = realizations; });
    add(app->add_option("--seed", seed, "master seed"),
        [this](RunConfig& c) { c.experiment.seed = seed; });
    add(app->add_option("--dt-max", dt_max, "step cap for smooth schedules, units 1/j_max"),
        [this](RunConfig& c) { c.experiment.settings.dt_max = dt_max; });
    add(app->add_option("--adiabatic-c", adiabatic_c, "adiabatic duration factor C"),
        [this](RunConfig& c) { c.experiment.protocol.adiabatic_c = adiabatic_c; });
    add(app->add_option("--sigma-ratio", sigma_ratio, "adiabatic ramp width sigma_t / t_out"),
        [this](RunConfig& c) { c.experiment.protocol.adiabatic_sigma_ratio = sigma_ratio; });
    add(app->add_option("--step-exponential", step_exponential, "taylor | eigen")
            ->check(CLI::IsMember({"taylor", "eigen"})),
        [this](RunConfig& c) {
          c.experiment.settings.step_exponential =
              step_exponential == "eigen" ? StepExponential::Eigen : StepExponential::Taylor;
        });
    app->add_option("--threads", threads,
                    "worker threads (default: $SPINXFER_THREADS or hardware concurrency)");
    app->add_option("--output,-o", output, "also write the table to this file (plus manifest)");
  }

  void add(CLI::Option* opt, std::function<void(RunConfig&)> apply) {
    overrides.emplace_back(opt, std::move(apply));
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(c);
    }
    return c;
  }

  unsigned thread_count() const { return threads == 0 ? default_thread_count() : threads; }
};

void write_outputs(const ExperimentFlags& flags, const std::string& command, const RunConfig& config,
                   const std::string& table) {
  if (flags.output.empty()) return;
  write_text(flags.output, table);
  RunManifest m;
  m.config = config;
  m.command = command;
  m.tool_version = kVersion;
  m.seed = config.experiment.seed;
  m.threads = flags.thread_count();
  m.timestamp = utc_timestamp();
  write_text(manifest_path(flags.output), serialize_manifest(m));
}

int do_run(const ExperimentFlags& flags, std::ostream& out) {
  RunConfig config = flags.resolve();
  config.sweep.reset();
  config.trajectory.reset();
  const auto& e = config.experiment;
  e.validate();
  SweepRow row;
  row.protocol = e.protocol.kind;
  row.n_sites = e.chain.n_sites;
  row.sigma_h = e.disorder.sigma_h;
  row.sigma_j = e.disorder.sigma_j;
  row.realizations = e.realizations;
  row.seed = e.seed;
  row.stats = run_point(e, {flags.thread_count()});
  std::ostringstream table;
  write_csv(std::span<const SweepRow>(&row, 1), table);
  out << table.str();
  write_outputs(flags, "run", config, table.str());
  return kOk;
}

struct SweepFlags {
  std::string sigma_h;
  std::string sigma_j;
  std::string n_values;
  std::string protocols;
  CLI::Option* sigma_h_opt = nullptr;
  CLI::Option* sigma_j_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* protocols_opt = nullptr;

  void bind(CLI::App* app) {
    sigma_h_opt = app->add_option("--sigma-h-values", sigma_h,
                                  "list a,b,c or range start:stop:step (default 0:0.3:0.02)");
    sigma_j_opt = app->add_option("--sigma-j-values", sigma_j, "list or range (default 0)");
    n_opt = app->add_option("--n-values", n_values, "comma-separated chain lengths");
    protocols_opt = app->add_option("--protocols", protocols, "comma-separated protocol names");
  }
};

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int do_sweep(const ExperimentFlags& flags, const SweepFlags& sweep_flags, std::ostream& out) {
  RunConfig config = flags.resolve();
  config.trajectory.reset();
  SweepGrid grid;
  if (config.sweep) {
    grid = *config.sweep;
  } else {
    grid.sigma_h = parse_real_list("0:0.3:0.02");
    grid.sigma_j = {0.0};
    grid.n_sites = {config.experiment.chain.n_sites};
    grid.protocols = {config.experiment.protocol.kind};
  }
  if (sweep_flags.sigma_h_opt->count()) grid.sigma_h = parse_real_list(sweep_flags.sigma_h);
  if (sweep_flags.sigma_j_opt->count()) grid.sigma_j = parse_real_list(sweep_flags.sigma_j);
  if (sweep_flags.n_opt->count()) {
    grid.n_sites.clear();
    for (const auto& s : split_commas(sweep_flags.n_values)) {
      std::size_t pos = 0;
      const auto v = std::stoull(s, &pos);
      if (pos != s.size()) throw InputError("bad chain length '" + s + "'");
      grid.n_sites.push_back(v);
    }
  }
  if (sweep_flags.protocols_opt->count()) {
    grid.protocols.clear();
    for (const auto& s : split_commas(sweep_flags.protocols)) {
      grid.protocols.push_back(parse_protocol(s));
    }
  }
  grid.validate();
  // Check every point before spending time on any of them.
  for (const auto p : grid.protocols) {
    for (const auto n : grid.n_sites) {
      point_config(config.experiment, p, n, grid.sigma_h[0], grid.sigma_j[0]).validate();
    }
  }
  config.sweep = grid;
  const auto rows = run_sweep(grid, config.experiment, {flags.thread_count()});
  std::ostringstream table;
  write_csv(rows, table);
  out << table.str();
  write_outputs(flags, "sweep", config, table.str());
  return kOk;
}

struct TrajectoryFlags {
  bool noiseless = false;
  std::uint64_t index = 0;
  std::size_t stride = 0;
  CLI::Option* noiseless_opt = nullptr;
  CLI::Option* index_opt = nullptr;
  CLI::Option* stride_opt = nullptr;

  void bind(CLI::App* app) {
    noiseless_opt = app->add_flag("--noiseless", noiseless, "ignore the disorder settings");
    index_opt = app->add_option("--index", index, "realization index to record");
    stride_opt = app->add_option("--stride", stride,
                                 "steps between snapshots (default: about 500 rows)")
                     ->check(CLI::PositiveNumber);
  }
};

int do_trajectory(const ExperimentFlags& flags, const TrajectoryFlags& tf, std::ostream& out) {
  RunConfig config = flags.resolve();
  config.sweep.reset();
  const bool from_file = config.trajectory.has_value();
  TrajectoryRequest request = config.trajectory.value_or(TrajectoryRequest{});
  if (tf.noiseless_opt->count()) request.noiseless = tf.noiseless;
  if (tf.index_opt->count()) request.index = tf.index;
  config.trajectory = request;

  auto& e = config.experiment;
  e.validate();
  const auto schedule = make_schedule(e.chain, e.protocol);
  if (tf.stride_opt->count()) {
    e.settings.trajectory_stride = tf.stride;
  } else if (!from_file) {
    const double sample_dt = schedule.t_out() / static_cast<double>(kTrajectoryRows);
    e.settings.trajectory_stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_dt / e.settings.dt_max)));
  }
  e.settings.record_trajectory = true;

  const auto realization = request.noiseless
                               ? DisorderRealization::none(e.chain.n_sites)
                               : sample_realization(e.disorder, e.chain, e.seed, request.index);
  const auto result = propagate_schedule(schedule, realization,
                                         StateVector::basis(e.chain.n_sites, 0), e.settings);
  std::ostringstream table;
  write_trajectory_csv(*result.trajectory, schedule, table);
  out << table.str();
  write_outputs(flags, "trajectory", config, table.str());
  return kOk;
}

struct VerifyFlags {
  bool full = false;
  std::string only;
  VerifyOptions options;
};

int do_verify(const VerifyFlags& flags, std::ostream& out) {
  std::set<int> selected;
  for (const auto& s : split_commas(flags.only)) {
    std::size_t pos = 0;
    const int id = std::stoi(s, &pos);
    if (pos != s.size()) throw InputError("bad criterion id '" + s + "'");
    selected.insert(id);
  }
  bool all_passed = true;
  int ran = 0;
  for (const auto& criterion : acceptance_criteria()) {
    if (!selected.empty() && !selected.contains(criterion.id)) continue;
    if (selected.empty() && criterion.monte_carlo && !flags.full) continue;
    const auto r = run_criterion(criterion, flags.options);
    out << format_result(r) << '\n' << std::flush;
    all_passed = all_passed && r.passed;
    ++ran;
  }
  out << (all_passed ? "all " : "some ") << ran << " criteria "
      << (all_passed ? "passed" : "FAILED") << '\n';
  return all_passed ? kOk : kVerifyFailed;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  auto number = [](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw InputError("bad number '" + s + "'");
    }
    if (pos != s.size()) throw InputError("bad number '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw InputError("range must be start:stop:step, got '" + text + "'");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw InputError("empty or invalid range '" + text + "'");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
  }
  std::vector<double> out;
  for (const auto& s : split_commas(text)) out.push_back(number(s));
  if (out.empty()) throw InputError("empty value list");
  return out;
}

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-excitation state transfer in disordered XX spin chains", "spinxfer"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  auto* run = app.add_subcommand("run", "Monte Carlo ensemble at one parameter point");
  run_flags.bind(run);

  ExperimentFlags sweep_exp_flags;
  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Ensemble statistics over a parameter grid (CSV)");
  sweep_exp_flags.bind(sweep);
  sweep_flags.bind(sweep);

  ExperimentFlags traj_exp_flags;
  TrajectoryFlags traj_flags;
  auto* traj = app.add_subcommand("trajectory", "Site populations |A_j(t)|^2 of a single run");
  traj_exp_flags.bind(traj);
  traj_flags.bind(traj);

  VerifyFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "Run the built-in acceptance checks");
  verify->add_flag("--full", verify_flags.full, "include the Monte Carlo criteria (minutes)");
  verify->add_option("--only", verify_flags.only, "comma-separated criterion ids");
  verify->add_option("--seed", verify_flags.options.seed, "master seed");
  verify->add_option("--realizations", verify_flags.options.realizations,
                     "realizations per Monte Carlo point")
      ->check(CLI::PositiveNumber);
  verify->add_option("--threads", verify_flags.options.threads, "worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (run->parsed()) return do_run(run_flags, out);
    if (sweep->parsed()) return do_sweep(sweep_exp_flags, sweep_flags, out);
    if (traj->parsed()) return do_trajectory(traj_exp_flags, traj_flags, out);
    if (verify->parsed()) return do_verify(verify_flags, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kInputError;
}

}  // namespace spinxfer::cli
