#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "stablemap/cli.hpp"

using namespace stablemap;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "stablemap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("stablemap_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(cli::output_dir_env);
  }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_F(CliTest, StableWritesCsvAndManifest) {
  const auto r = invoke({"stable", "--alpha", "1.6", "--eta", "0.5", "-R", "20", "--n", "200", "--seed", "3", "-o", at("s.csv")});
  ASSERT_EQ(r.code, cli::exit_ok) << r.err;
  const auto t = io::read_csv(at("s.csv"));
  EXPECT_EQ(t.kind, "stable");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"realisation", "value"}));
  ASSERT_EQ(t.rows.size(), 20u);
  auto streams = RealisationStreams::derive(3, 4);
  EXPECT_EQ(t.rows[4][1], stable_sample(200, StableParams(1.6, 0.5, 0.0), streams));
  const auto m = read_json(at("s.manifest.json"));
  EXPECT_EQ(m["generator"], "stable");
  EXPECT_EQ(m["master_seed"], 3);
  EXPECT_EQ(m["parameters"]["n"], 200);
  EXPECT_EQ(m["failures"]["guard_exceeded"], 0);
}

TEST_F(CliTest, ManifestConfigReproducesRun) {
  ASSERT_EQ(invoke({"stable", "-R", "5", "--n", "100", "--beta", "0.3", "-o", at("a.csv")}).code, 0);
  const auto m = read_json(at("a.manifest.json"));
  {
    std::ofstream cfg(at("a.ini"));
    cfg << m["config"].get<std::string>();
  }
  ASSERT_EQ(invoke({"stable", "--config", at("a.ini"), "-o", at("b.csv")}).code, 0);
  EXPECT_EQ(io::read_csv(at("a.csv")).rows, io::read_csv(at("b.csv")).rows);
}

TEST_F(CliTest, LevyGrid) {
  ASSERT_EQ(invoke({"levy", "-R", "3", "--n", "500", "--grid", "0:1:1000", "-o", at("l.csv")}).code, 0);
  const auto t = io::read_csv(at("l.csv"));
  ASSERT_EQ(t.rows.size(), 3u * 1001u);
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(t.rows[r * 1001][1], 0.0);
    EXPECT_EQ(t.rows[r * 1001][2], 0.0);
  }
}

TEST_F(CliTest, SdeSweepWritesOneFilePerEps) {
  const auto r = invoke({"sde", "--example", "example2", "--eps", "1e-2,5e-3", "-R", "4", "--record", "0:1:4", "-o", at("e2.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"e2_eps0.01.csv", "e2_eps0.005.csv"}) {
    const auto t = io::read_csv(at(name));
    EXPECT_EQ(t.kind, "sde");
    EXPECT_EQ(t.rows.size(), 20u);
    for (const auto& row : t.rows) EXPECT_GT(row[2], 0.0);
  }
  const auto m = read_json(at("e2_eps0.005.manifest.json"));
  EXPECT_EQ(m["parameters"]["eps"], 5e-3);
  EXPECT_EQ(m["spurious_fixed_points"].size(), 5u);
}

TEST_F(CliTest, SdeEulerMaruyama) {
  const auto r = invoke({"sde", "--method", "em", "--example", "example1", "--dt", "1e-3", "-R", "3", "-o", at("em.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_csv(at("em.csv")).rows.size(), 3u);
  const auto m = read_json(at("em.manifest.json"));
  EXPECT_EQ(m["generator"], "sde-em");
  EXPECT_TRUE(m.contains("boundary_crossings"));
}

TEST_F(CliTest, PostProcessing) {
  ASSERT_EQ(invoke({"sde", "--example", "example2", "--eps", "1e-2", "-R", "2", "--t", "2", "--record", "0:2:200", "-o", at("p.csv")}).code, 0);
  auto r = invoke({"density", "--in", at("p.csv"), "--bins", "10", "-o", at("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto d = io::read_csv(at("d.csv"));
  EXPECT_EQ(d.columns, (std::vector<std::string>{"bin_center", "density"}));
  EXPECT_EQ(d.rows.size(), 10u);

  r = invoke({"density", "--in", at("p.csv"), "--smooth", "--points", "50", "-o", at("ds.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  d = io::read_csv(at("ds.csv"));
  EXPECT_EQ(d.kind, "density-smooth");
  EXPECT_EQ(d.rows.size(), 50u);

  r = invoke({"density", "--in", at("p.csv"), "--flag", "1.0", "--range", "0:2", "--bins", "4", "-o", at("df.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  d = io::read_csv(at("df.csv"));
  EXPECT_EQ(d.columns.back(), "flagged");

  r = invoke({"acf", "--in", at("p.csv"), "--max-lag", "10", "-o", at("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto c = io::read_csv(at("c.csv"));
  ASSERT_EQ(c.rows.size(), 11u);
  EXPECT_EQ(c.rows[0][1], 1.0);
  EXPECT_NEAR(c.rows[1][0], 0.01, 1e-12);

  r = invoke({"ks", "--a", at("p.csv"), "--b", at("p.csv"), "--time", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "ks=0\n");
}

TEST_F(CliTest, MapAndOrbit) {
  ASSERT_EQ(invoke({"map", "--gamma", "0", "--points", "4", "-o", at("m.csv")}).code, 0);
  const auto m = io::read_csv(at("m.csv"));
  ASSERT_EQ(m.rows.size(), 5u);
  EXPECT_EQ(m.rows[1][1], 0.5);
  ASSERT_EQ(invoke({"orbit", "--gamma", "0.625", "--x0", "0.25", "--steps", "3", "-o", at("o.csv")}).code, 0);
  const auto o = io::read_csv(at("o.csv"));
  ASSERT_EQ(o.rows.size(), 4u);
  EXPECT_NEAR(o.rows[1][1], 0.36021348515126374, 1e-14);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  setenv(cli::output_dir_env, dir_.c_str(), 1);
  ASSERT_EQ(invoke({"stable", "-R", "2", "--n", "50", "-o", "env.csv"}).code, 0);
  unsetenv(cli::output_dir_env);
  EXPECT_TRUE(fs::exists(at("env.csv")));
  EXPECT_TRUE(fs::exists(at("env.manifest.json")));
}

TEST_F(CliTest, ConfigFileAndOverride) {
  {
    std::ofstream cfg(at("c.ini"));
    cfg << "# comment\nalpha=1.5\neta=\"2\"\nn=100\nrealisations=2\n";
  }
  ASSERT_EQ(invoke({"stable", "--config", at("c.ini"), "--alpha", "1.7", "-o", at("c.csv")}).code, 0);
  const auto m = read_json(at("c.manifest.json"));
  EXPECT_EQ(m["parameters"]["alpha"], 1.7);
  EXPECT_EQ(m["parameters"]["eta"], 2.0);
  EXPECT_EQ(m["realisations"], 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({"stable", "--alpha", "1", "-o", at("x.csv")}).code, cli::exit_validation);
  EXPECT_EQ(invoke({"stable", "--beta", "2", "-o", at("x.csv")}).code, cli::exit_validation);
  EXPECT_EQ(invoke({"stable", "--bogus", "1"}).code, cli::exit_validation);
  EXPECT_EQ(invoke({}).code, cli::exit_validation);
  EXPECT_EQ(invoke({"sde", "--method", "rk4", "-o", at("x.csv")}).code, cli::exit_validation);
  EXPECT_EQ(invoke({"sde", "--alpha", "0.8", "-o", at("x.csv")}).code, cli::exit_validation);
  EXPECT_EQ(invoke({"levy", "--grid", "1:0:5", "-o", at("x.csv")}).code, cli::exit_validation);
  {
    std::ofstream cfg(at("bad.ini"));
    cfg << "unknown_key=3\n";
  }
  EXPECT_EQ(invoke({"stable", "--config", at("bad.ini")}).code, cli::exit_validation);
  EXPECT_EQ(invoke({"stable", "--config", at("missing.ini")}).code, cli::exit_io);
  EXPECT_EQ(invoke({"ks", "--a", at("missing.csv"), "--b", at("missing.csv")}).code, cli::exit_io);
  {
    std::ofstream bad(at("bad.csv"));
    bad << "not,a,stablemap,file\n";
  }
  EXPECT_EQ(invoke({"density", "--in", at("bad.csv")}).code, cli::exit_schema);
  const auto all_fail = invoke({"stable", "-R", "3", "--n", "10000", "--guard", "10", "-o", at("g.csv")});
  EXPECT_EQ(all_fail.code, cli::exit_all_failed);
  EXPECT_NE(all_fail.err.find("guard 3"), std::string::npos);
}

TEST_F(CliTest, PartialFailureWarns) {
  const auto r = invoke({"stable", "-R", "40", "--n", "400", "--guard", "2000", "-o", at("pf.csv")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("realisations failed"), std::string::npos);
  const auto m = read_json(at("pf.manifest.json"));
  EXPECT_GT(m["failures"]["guard_exceeded"].get<int>(), 0);
  EXPECT_EQ(io::read_csv(at("pf.csv")).rows.size() + m["failures"]["guard_exceeded"].get<std::size_t>(), 40u);
}

TEST_F(CliTest, SkewedSlowRegimeWarns) {
  const auto r = invoke({"stable", "--alpha", "0.8", "--beta", "1", "-R", "1", "--n", "10", "-o", at("w.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("1e7"), std::string::npos);
}

TEST_F(CliTest, Help) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("stable"), std::string::npos);
}

TEST(CliGrid, Parsing) {
  EXPECT_EQ(cli::parse_grid("0:1:4"), (std::vector<double>{0, 0.25, 0.5, 0.75, 1}));
  EXPECT_EQ(cli::parse_grid("0.5,1,2"), (std::vector<double>{0.5, 1, 2}));
  EXPECT_THROW(cli::parse_grid("0:1"), invalid_parameter);
  EXPECT_THROW(cli::parse_grid("0:1:x"), invalid_parameter);
  EXPECT_THROW(cli::parse_grid("0:1:2.5"), invalid_parameter);
  EXPECT_EQ(cli::parse_range("-1:3"), (std::pair<double, double>{-1, 3}));
}
