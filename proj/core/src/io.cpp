#include "spinxfer/io.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "spinxfer/errors.hpp"

namespace spinxfer {

using nlohmann::json;

namespace {

std::string_view to_string(StepExponential e) {
  return e == StepExponential::Eigen ? "eigen" : "taylor";
}

StepExponential parse_step_exponential(const std::string& s) {
  if (s == "taylor") return StepExponential::Taylor;
  if (s == "eigen") return StepExponential::Eigen;
  throw InputError("unknown step_exponential '" + s + "' (expected taylor or eigen)");
}

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw InputError("config: '" + std::string(where) + "' must be an object");
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const auto key : allowed) known = known || item.key() == key;
    if (!known) {
      throw InputError("config: unknown key '" + item.key() + "' in '" + std::string(where) + "'");
    }
  }
}

template <typename T>
void read_if(const json& obj, const char* key, T& target) {
  if (const auto it = obj.find(key); it != obj.end()) target = it->get<T>();
}

json to_json(const ExperimentConfig& c) {
  return {
      {"chain", {{"n_sites", c.chain.n_sites}, {"j_max", c.chain.j_max}}},
      {"protocol",
       {{"kind", std::string(to_string(c.protocol.kind))},
        {"adiabatic_c", c.protocol.adiabatic_c},
        {"adiabatic_sigma_ratio", c.protocol.adiabatic_sigma_ratio}}},
      {"disorder", {{"sigma_h", c.disorder.sigma_h}, {"sigma_j", c.disorder.sigma_j}}},
      {"realizations", c.realizations},
      {"seed", c.seed},
      {"propagation",
       {{"dt_max", c.settings.dt_max},
        {"record_trajectory", c.settings.record_trajectory},
        {"trajectory_stride", c.settings.trajectory_stride},
        {"step_exponential", std::string(to_string(c.settings.step_exponential))}}},
  };
}

json to_json(const SweepGrid& g) {
  std::vector<std::string> protocols;
  for (const auto p : g.protocols) protocols.emplace_back(to_string(p));
  return {{"sigma_h", g.sigma_h},
          {"sigma_j", g.sigma_j},
          {"n_sites", g.n_sites},
          {"protocols", protocols}};
}

json to_json(const RunConfig& c) {
  json j = to_json(c.experiment);
  if (c.sweep) j["sweep"] = to_json(*c.sweep);
  if (c.trajectory) {
    j["trajectory"] = {{"noiseless", c.trajectory->noiseless}, {"index", c.trajectory->index}};
  }
  return j;
}

RunConfig from_json(const json& j) {
  reject_unknown(j, "config",
                 {"chain", "protocol", "disorder", "realizations", "seed", "propagation", "sweep",
                  "trajectory"});
  RunConfig rc;
  auto& c = rc.experiment;
  if (const auto it = j.find("chain"); it != j.end()) {
    reject_unknown(*it, "chain", {"n_sites", "j_max"});
    read_if(*it, "n_sites", c.chain.n_sites);
    read_if(*it, "j_max", c.chain.j_max);
  }
  if (const auto it = j.find("protocol"); it != j.end()) {
    reject_unknown(*it, "protocol", {"kind", "adiabatic_c", "adiabatic_sigma_ratio"});
    if (const auto k = it->find("kind"); k != it->end()) {
      c.protocol.kind = parse_protocol(k->get<std::string>());
    }
    read_if(*it, "adiabatic_c", c.protocol.adiabatic_c);
    read_if(*it, "adiabatic_sigma_ratio", c.protocol.adiabatic_sigma_ratio);
  }
  if (const auto it = j.find("disorder"); it != j.end()) {
    reject_unknown(*it, "disorder", {"sigma_h", "sigma_j"});
    read_if(*it, "sigma_h", c.disorder.sigma_h);
    read_if(*it, "sigma_j", c.disorder.sigma_j);
  }
  read_if(j, "realizations", c.realizations);
  read_if(j, "seed", c.seed);
  if (const auto it = j.find("propagation"); it != j.end()) {
    reject_unknown(*it, "propagation",
                   {"dt_max", "record_trajectory", "trajectory_stride", "step_exponential"});
    read_if(*it, "dt_max", c.settings.dt_max);
    read_if(*it, "record_trajectory", c.settings.record_trajectory);
    read_if(*it, "trajectory_stride", c.settings.trajectory_stride);
    if (const auto e = it->find("step_exponential"); e != it->end()) {
      c.settings.step_exponential = parse_step_exponential(e->get<std::string>());
    }
  }
  if (const auto it = j.find("sweep"); it != j.end()) {
    reject_unknown(*it, "sweep", {"sigma_h", "sigma_j", "n_sites", "protocols"});
    SweepGrid g;
    g.n_sites = {c.chain.n_sites};
    g.protocols = {c.protocol.kind};
    read_if(*it, "sigma_h", g.sigma_h);
    read_if(*it, "sigma_j", g.sigma_j);
    read_if(*it, "n_sites", g.n_sites);
    if (const auto p = it->find("protocols"); p != it->end()) {
      g.protocols.clear();
      for (const auto& name : *p) g.protocols.push_back(parse_protocol(name.get<std::string>()));
    }
    g.validate();
    rc.sweep = std::move(g);
  }
  if (const auto it = j.find("trajectory"); it != j.end()) {
    reject_unknown(*it, "trajectory", {"noiseless", "index"});
    TrajectoryRequest t;
    read_if(*it, "noiseless", t.noiseless);
    read_if(*it, "index", t.index);
    rc.trajectory = t;
  }
  return rc;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string serialize_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

RunConfig parse_config(std::string_view text) {
  const json j = parse_json(text);
  try {
    if (j.is_object() && j.contains("config") && j.contains("tool_version")) {
      return from_json(j.at("config"));
    }
    return from_json(j);
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string serialize_manifest(const RunManifest& m) {
  const json j = {{"config", to_json(m.config)},
                  {"command", m.command},
                  {"tool_version", m.tool_version},
                  {"seed", m.seed},
                  {"threads", m.threads},
                  {"timestamp", m.timestamp}};
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text) {
  const json j = parse_json(text);
  try {
    RunManifest m;
    m.config = from_json(j.at("config"));
    m.command = j.value("command", "");
    m.tool_version = j.at("tool_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.threads = j.value("threads", 1u);
    m.timestamp = j.value("timestamp", "");
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("manifest: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest.json";
  return p;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

constexpr std::array<std::string_view, 10> kColumns = {
    "protocol", "N", "sigma_h", "sigma_j", "realizations",
    "mean_prob", "stderr_prob", "mean_fid", "stderr_fid", "seed"};

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IoError("CSV: bad number '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw IoError("CSV: bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::span<const std::string_view> csv_columns() { return kColumns; }

std::string format_double(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void write_csv(std::span<const SweepRow> rows, std::ostream& out) {
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    out << (i ? "," : "") << kColumns[i];
  }
  out << '\n';
  for (const auto& r : rows) {
    out << to_string(r.protocol) << ',' << r.n_sites << ',' << format_double(r.sigma_h) << ','
        << format_double(r.sigma_j) << ',' << r.realizations << ','
        << format_double(r.stats.mean_probability) << ','
        << format_double(r.stats.stderr_probability) << ','
        << format_double(r.stats.mean_fidelity) << ','
        << format_double(r.stats.stderr_fidelity) << ',' << r.seed << '\n';
  }
}

void write_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_csv(rows, ss);
  write_text(path, ss.str());
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("CSV: missing header");
  const auto header = split(line);
  if (header.size() != kColumns.size() ||
      !std::equal(header.begin(), header.end(), kColumns.begin())) {
    throw IoError("CSV: unexpected header '" + line + "'");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kColumns.size()) throw IoError("CSV: wrong field count in '" + line + "'");
    SweepRow r;
    try {
      r.protocol = parse_protocol(f[0]);
    } catch (const InputError& e) {
      throw IoError(std::string("CSV: ") + e.what());
    }
    r.n_sites = parse_u64(f[1]);
    r.sigma_h = parse_double(f[2]);
    r.sigma_j = parse_double(f[3]);
    r.realizations = parse_u64(f[4]);
    r.stats.mean_probability = parse_double(f[5]);
    r.stats.stderr_probability = parse_double(f[6]);
    r.stats.mean_fidelity = parse_double(f[7]);
    r.stats.stderr_fidelity = parse_double(f[8]);
    r.seed = parse_u64(f[9]);
    r.stats.count = r.realizations;
    rows.push_back(r);
  }
  return rows;
}

void write_trajectory_csv(const Trajectory& trajectory, const CouplingSchedule& schedule,
                          std::ostream& out) {
  const std::size_t n = schedule.n_sites();
  const auto& shape = schedule.shape();
  out << "t";
  for (std::size_t j = 1; j <= n; ++j) out << ",p" << j;
  if (shape) out << ",j_odd,j_even";
  out << '\n';
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const double t = trajectory.times[i];
    out << format_double(t);
    for (const auto& a : trajectory.states[i].amplitudes()) out << ',' << format_double(std::norm(a));
    if (shape) {
      out << ',' << format_double(shape->odd(t) / shape->j_max) << ','
          << format_double(shape->even(t) / shape->j_max);
    }
    out << '\n';
  }
}

}  // namespace spinxfer
