#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "spinxfer/errors.hpp"
#include "spinxfer/io.hpp"

namespace spinxfer {
namespace {

namespace fs = std::filesystem;

RunConfig sample_config() {
  RunConfig c;
  c.experiment.chain = {31, 1.5};
  c.experiment.protocol = {ProtocolKind::Adiabatic, 12.0, 0.1};
  c.experiment.disorder = {0.15, 0.05};
  c.experiment.realizations = 250;
  c.experiment.seed = 0xdeadbeefcafeULL;
  c.experiment.settings.dt_max = 0.02;
  c.experiment.settings.step_exponential = StepExponential::Eigen;
  SweepGrid g;
  g.sigma_h = {0.0, 0.1, 0.30000000000000004};
  g.sigma_j = {0.0};
  g.n_sites = {15, 25};
  g.protocols = {ProtocolKind::SequentialSwap, ProtocolKind::Adiabatic};
  c.sweep = g;
  c.trajectory = TrajectoryRequest{false, 12};
  return c;
}

TEST(Config, RoundTrip) {
  const auto c = sample_config();
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  const RunConfig defaults;
  EXPECT_EQ(parse_config(serialize_config(defaults)), defaults);
}

TEST(Config, MissingKeysKeepDefaults) {
  const auto c = parse_config(R"({"chain": {"n_sites": 9}})");
  EXPECT_EQ(c.experiment.chain.n_sites, 9u);
  EXPECT_EQ(c.experiment.chain.j_max, 1.0);
  EXPECT_EQ(c.experiment.realizations, 1000u);
  EXPECT_FALSE(c.sweep.has_value());
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{"), InputError);
  EXPECT_THROW(parse_config(R"({"chian": {}})"), InputError);
  EXPECT_THROW(parse_config(R"({"chain": {"n_sites": 9, "extra": 1}})"), InputError);
  EXPECT_THROW(parse_config(R"({"protocol": {"kind": "teleport"}})"), InputError);
  EXPECT_THROW(parse_config(R"({"chain": {"n_sites": "many"}})"), InputError);
  EXPECT_THROW(parse_config(R"({"propagation": {"step_exponential": "pade"}})"), InputError);
  EXPECT_THROW(parse_config("[1, 2]"), InputError);
}

TEST(Config, LoadFromFile) {
  const fs::path p = fs::temp_directory_path() / "spinxfer_test_config.json";
  write_text(p, serialize_config(sample_config()));
  EXPECT_EQ(load_config(p), sample_config());
  fs::remove(p);
  EXPECT_THROW(load_config(p), IoError);
}

TEST(Manifest, RoundTripAndUsableAsConfig) {
  RunManifest m;
  m.config = sample_config();
  m.command = "sweep";
  m.tool_version = "0.1.0";
  m.seed = m.config.experiment.seed;
  m.threads = 3;
  m.timestamp = utc_timestamp();
  const auto text = serialize_manifest(m);
  const auto back = parse_manifest(text);
  EXPECT_EQ(back.config, m.config);
  EXPECT_EQ(back.command, "sweep");
  EXPECT_EQ(back.tool_version, "0.1.0");
  EXPECT_EQ(back.seed, m.seed);
  EXPECT_EQ(back.threads, 3u);
  EXPECT_EQ(back.timestamp, m.timestamp);
  EXPECT_EQ(parse_config(text), m.config);
  EXPECT_EQ(manifest_path("out/run.csv"), fs::path("out/run.csv.manifest.json"));
}

TEST(Manifest, TimestampIsIsoUtc) {
  const auto ts = utc_timestamp();
  ASSERT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts[4], '-');
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}

TEST(Csv, EmptyTableIsHeaderOnly) {
  std::ostringstream out;
  write_csv({}, out);
  EXPECT_EQ(out.str(),
            "protocol,N,sigma_h,sigma_j,realizations,mean_prob,stderr_prob,mean_fid,stderr_fid,"
            "seed\n");
  std::istringstream in(out.str());
  EXPECT_TRUE(read_csv(in).empty());
}

TEST(Csv, RoundTripIsExact) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SweepRow> rows;
  for (int i = 0; i < 50; ++i) {
    SweepRow r;
    r.protocol = static_cast<ProtocolKind>(i % 3);
    r.n_sites = 3 + 2 * static_cast<std::size_t>(i);
    r.sigma_h = u(gen) * 0.3;
    r.sigma_j = i % 2 ? 0.0 : u(gen);
    r.realizations = 1000;
    r.seed = gen();
    r.stats.mean_probability = u(gen);
    r.stats.stderr_probability = u(gen) * 1e-3;
    r.stats.mean_fidelity = 0.5 + u(gen) / 2;
    r.stats.stderr_fidelity = u(gen) * 1e-7;
    r.stats.count = 1000;
    rows.push_back(r);
  }
  std::stringstream ss;
  write_csv(rows, ss);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].protocol, rows[i].protocol);
    EXPECT_EQ(back[i].n_sites, rows[i].n_sites);
    EXPECT_EQ(back[i].sigma_h, rows[i].sigma_h);
    EXPECT_EQ(back[i].sigma_j, rows[i].sigma_j);
    EXPECT_EQ(back[i].seed, rows[i].seed);
    EXPECT_EQ(back[i].stats.mean_probability, rows[i].stats.mean_probability);
    EXPECT_EQ(back[i].stats.stderr_fidelity, rows[i].stats.stderr_fidelity);
  }
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), IoError);
  std::istringstream header("a,b\n");
  EXPECT_THROW(read_csv(header), IoError);
  std::ostringstream good;
  write_csv({}, good);
  std::istringstream short_row(good.str() + "swap,25,0.1\n");
  EXPECT_THROW(read_csv(short_row), IoError);
  std::istringstream bad_num(good.str() + "swap,25,x,0,10,1,0,1,0,1\n");
  EXPECT_THROW(read_csv(bad_num), IoError);
}

TEST(Files, UnwritablePathIsIoError) {
  EXPECT_THROW(write_text("/nonexistent-dir/x/out.csv", "x"), IoError);
  EXPECT_THROW(read_text("/nonexistent-dir/x/in.csv"), IoError);
}

TEST(TrajectoryCsv, ColumnsDependOnProtocol) {
  Trajectory tr;
  tr.times = {0.0};
  tr.states = {StateVector::basis(3, 0)};
  std::ostringstream spin;
  write_trajectory_csv(tr, spin_coupling_schedule({3, 1.0}), spin);
  EXPECT_EQ(spin.str(), "t,p1,p2,p3\n0,1,0,0\n");
  std::ostringstream adia;
  write_trajectory_csv(tr, adiabatic_schedule({3, 1.0}, {ProtocolKind::Adiabatic, 8.0, 0.125}),
                       adia);
  EXPECT_EQ(adia.str().substr(0, 25), "t,p1,p2,p3,j_odd,j_even\n0");
}

}  // namespace
}  // namespace spinxfer
