#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "kerrsim/cli.hpp"
#include "kerrsim/fidelity.hpp"

using namespace kerrsim::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "kerrsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kerrsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

RunConfig command(const std::string& name) {
  RunConfig c;
  c.command = name;
  return c;
}

}  // namespace

TEST(Resolve, CommandDefaults) {
  EXPECT_EQ(*resolve(command("cat")).alpha, 2.0);
  EXPECT_NEAR(*resolve(command("cat")).phi, std::numbers::pi / 2, 1e-15);
  EXPECT_EQ(*resolve(command("bell")).alpha, 2.5);
  EXPECT_EQ(*resolve(command("measure-demo")).alpha, 3.0);
  EXPECT_EQ(resolve(command("fidelity-sweep")).n_list, (std::vector<double>{30, 50, 100}));
  EXPECT_EQ(resolve(command("scaling")).n_list, (std::vector<double>{20, 30, 50, 100, 200}));
}

TEST(Resolve, RejectsInvalidConfigs) {
  EXPECT_THROW(resolve(command("plot")), std::invalid_argument);
  RunConfig c = command("fidelity-sweep");
  c.phi_grid = {0.0, 1.0, 1};
  EXPECT_THROW(resolve(c), std::invalid_argument);
  c.phi_grid = {0.0, 0.0, 1};
  EXPECT_NO_THROW(resolve(c));
  c.phi_grid = {1.0, 0.0, 5};
  EXPECT_THROW(resolve(c), std::invalid_argument);
  RunConfig b = command("bell");
  b.mode = "sampled";
  b.shots = 0;
  EXPECT_THROW(resolve(b), std::invalid_argument);
  b.shots = 10;
  b.format = "xml";
  EXPECT_THROW(resolve(b), std::invalid_argument);
  RunConfig s = command("scaling");
  s.n_list = {20, 30};
  EXPECT_THROW(resolve(s), std::invalid_argument);
  RunConfig a = command("cat");
  a.alpha = -1.0;
  EXPECT_THROW(resolve(a), std::invalid_argument);
}

TEST(Config, RoundTrip) {
  RunConfig c = command("bell");
  c.alpha = 2.25;
  c.n_list = {12.5, 40};
  c.phi = 1.2;
  c.phi_grid = {-0.02, 0.03, 7};
  c.delta_phi_grid = {0.0, 0.1, 11};
  c.threshold = 6;
  c.seed = 0xFFFFFFFFFFFFFFFFULL;
  c.shots = 1234;
  c.mode = "sampled";
  c.format = "json";
  c.output = "out.json";
  c.scope = "preparation";
  c.jitter = 0.004;
  c.refine = true;
  c.gaussian = true;
  c.circuit = "c.json";
  c.dump_state = "s.json";
  EXPECT_EQ(config_from_json(to_json(c)), c);
  EXPECT_EQ(config_from_json(json::parse(to_json(c).dump())), c);
  EXPECT_EQ(config_from_json(to_json(RunConfig{})), RunConfig{});
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(config_from_json(json{{"command", "cat"}, {"alpah", 2.0}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(json{{"phi_grid", {{"min", 0.0}, {"stepz", 3}}}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(json{{"alpha", "two"}}), std::invalid_argument);
}

TEST(Cat, FidelityAgainstClosedForm) {
  for (double phi : {std::numbers::pi / 2, std::numbers::pi, 0.0}) {
    RunConfig c = command("cat");
    c.phi = phi;
    const auto a = run_command(c);
    EXPECT_GE(a.summary.at("fidelity").get<double>(), 1.0 - 1e-10) << phi;
    EXPECT_EQ(a.columns, (std::vector<std::string>{"n", "probability"}));
  }
  RunConfig c = command("cat");
  c.phi = 0.0;
  EXPECT_NEAR(run_command(c).summary.at("fidelity").get<double>(), 1.0, 1e-14);
}

TEST(Cat, PhotonDistributionIsPoisson) {
  const auto a = run_command(command("cat"));
  double total = 0.0;
  for (const auto& row : a.rows) {
    const auto n = row[0].get<std::size_t>();
    const double p = row[1].get<double>();
    EXPECT_NEAR(p, std::exp(-8.0 + n * std::log(8.0) - std::lgamma(n + 1.0)), 1e-13);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(FidelitySweep, OrderingAndDualPath) {
  const auto a = run_command(command("fidelity-sweep"));
  EXPECT_EQ(a.columns, (std::vector<std::string>{"N", "phi_tilde", "fidelity_exact", "fidelity_fock", "fidelity_gaussian"}));
  EXPECT_EQ(a.rows.size(), 3u * 201u);
  EXPECT_TRUE(a.summary.at("ordering_holds").get<bool>());
  EXPECT_LT(a.summary.at("max_abs_exact_minus_fock").get<double>(), 1e-8);
  for (const auto& row : a.rows) EXPECT_LT(std::abs(row[2].get<double>() - row[3].get<double>()), 1e-8);
}

TEST(FidelitySweep, SinglePointGrid) {
  RunConfig c = command("fidelity-sweep");
  c.n_list = {40};
  c.phi_grid = {0.0, 0.0, 1};
  const auto a = run_command(c);
  ASSERT_EQ(a.rows.size(), 1u);
  for (std::size_t k = 2; k < 5; ++k) EXPECT_NEAR(a.rows[0][k].get<double>(), 1.0, 1e-12);
}

TEST(Scaling, ExactAndGaussian) {
  const auto exact = run_command(command("scaling"));
  const double e = exact.summary.at("exponent").get<double>();
  EXPECT_GE(e, -1.55);
  EXPECT_LE(e, -1.45);
  EXPECT_TRUE(exact.summary.at("half_width_strictly_decreasing").get<bool>());
  RunConfig g = command("scaling");
  g.gaussian = true;
  EXPECT_NEAR(run_command(g).summary.at("exponent").get<double>(), -1.5, 1e-6);
}

TEST(Bell, ViolationAtZero) {
  RunConfig c = command("bell");
  c.delta_phi_grid = {0.0, 0.0, 1};
  const auto a = run_command(c);
  ASSERT_EQ(a.rows.size(), 1u);
  EXPECT_GE(a.rows[0][1].get<double>(), 2.7);
  EXPECT_EQ(a.exit_code, kExitOk);
  EXPECT_EQ(a.columns, (std::vector<std::string>{"delta_phi", "S", "discard_fraction", "E1", "E2", "E3", "E4"}));
}

TEST(Bell, GridCrossingMatchesBisection) {
  const auto a = run_command(command("bell"));
  const double grid = a.summary.at("crossing_from_grid").get<double>();
  const double bisected = a.summary.at("crossing_bisection").get<double>();
  EXPECT_NEAR(grid, bisected, 0.001);
  EXPECT_FALSE(a.summary.at("peak").at("monotone_from_zero").get<bool>());
}

TEST(Bell, NoViolationExitCode) {
  RunConfig c = command("bell");
  c.jitter = 0.3;
  c.delta_phi_grid = {0.0, 0.0, 1};
  EXPECT_EQ(run_command(c).exit_code, kExitNoViolation);
}

TEST(MeasureDemo, PoissonTail) {
  const auto a = run_command(command("measure-demo"));
  ASSERT_EQ(a.rows.size(), 2u);
  EXPECT_NEAR(a.rows[0][1].get<double>(), 0.98461890, 1e-7);
  EXPECT_LT(a.rows[0][2].get<double>(), 1e-3);
  EXPECT_NEAR(a.rows[1][2].get<double>(), a.rows[0][1].get<double>(), 1e-12);
}

TEST(Render, CsvFormatting) {
  Artifact a;
  a.columns = {"k", "x", "label"};
  a.rows = {{json(3), json(0.1), json("a")}, {json(10), json(-2.5e-7), json("b")}};
  EXPECT_EQ(render_csv(a), "k,x,label\n3,1.0000000000000001e-01,a\n10,-2.4999999999999999e-07,b\n");
  const auto j = render_json(a);
  EXPECT_EQ(j.at("rows")[1].at("k").get<int>(), 10);
}

TEST(Render, CsvIsLossless) {
  const auto a = run_command(command("measure-demo"));
  std::istringstream lines(render_csv(a));
  std::string header, line;
  std::getline(lines, header);
  std::getline(lines, line);
  const auto comma = line.find(',');
  EXPECT_EQ(std::stod(line.substr(comma + 1)), a.rows[0][1].get<double>());
}

TEST_F(CliFiles, WritesOutputSummaryAndManifest) {
  const auto r = run({"scaling", "--output", path("s.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(path("s.csv")).substr(0, 13), "N,half_width\n");
  const json summary = json::parse(slurp(path("s.csv.summary.json")));
  EXPECT_TRUE(summary.contains("exponent"));
  const json manifest = json::parse(slurp(path("s.csv.manifest.json")));
  EXPECT_EQ(manifest.at("schema_version").get<int>(), kSchemaVersion);
  EXPECT_EQ(manifest.at("config").at("command").get<std::string>(), "scaling");
  EXPECT_EQ(manifest.at("exit_code").get<int>(), 0);
  EXPECT_GE(manifest.at("duration_seconds").get<double>(), 0.0);
  EXPECT_TRUE(manifest.contains("started_at"));
  EXPECT_TRUE(manifest.contains("cutoffs"));
}

TEST_F(CliFiles, ManifestRerunIsBitIdentical) {
  ASSERT_EQ(run({"fidelity-sweep", "--n-list", "30,50", "--steps", "21", "--output", path("a.csv")}).code, 0);
  const auto r = run({"--config", path("a.csv.manifest.json"), "--output", path("b.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv.summary.json")), slurp(path("b.csv.summary.json")));
}

TEST_F(CliFiles, SampledBellIsReproducible) {
  const std::vector<std::string> base{"bell", "--mode", "sampled", "--seed", "7", "--shots", "20000",
                                      "--delta-phi-steps", "3", "--delta-phi-max", "0.04"};
  auto first = base, second = base;
  first.insert(first.end(), {"--output", path("x.csv")});
  second.insert(second.end(), {"--output", path("y.csv")});
  ASSERT_EQ(run(first).code, 0);
  ASSERT_EQ(run(second).code, 0);
  EXPECT_EQ(slurp(path("x.csv")), slurp(path("y.csv")));
  EXPECT_EQ(slurp(path("x.csv.summary.json")), slurp(path("y.csv.summary.json")));
}

TEST_F(CliFiles, FlagsOverrideConfigFile) {
  std::ofstream(path("c.json")) << json{{"command", "cat"}, {"alpha", 1.0}, {"format", "json"}}.dump();
  const auto r = run({"--config", path("c.json"), "--alpha", "1.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("summary").at("mean_photons").get<double>(), 4.5, 1e-10);
}

TEST_F(CliFiles, DumpStateAndCircuit) {
  std::ofstream(path("circ.json")) << R"({"ops":[{"kind":"kerr","mode":"A","phi":1.5707963267948966}]})";
  const auto r = run({"cat", "--circuit", path("circ.json"), "--dump-state", path("state.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GE(json::parse(r.out).at("summary").at("fidelity").get<double>(), 1.0 - 1e-10);
  const json state = json::parse(slurp(path("state.json")));
  EXPECT_EQ(state.at("re").size(), state.at("cutoff").get<std::size_t>() + 1);
}

TEST_F(CliFiles, UnwritableOutputIsIoError) {
  EXPECT_EQ(run({"measure-demo", "--output", path("missing/dir/out.csv")}).code, kExitIo);
}

TEST(ExitCodes, ConfigErrors) {
  EXPECT_EQ(run({"cat", "--bogus"}).code, kExitConfig);
  EXPECT_EQ(run({}).code, kExitConfig);
  EXPECT_EQ(run({"fidelity-sweep", "--steps", "1"}).code, kExitConfig);
  EXPECT_EQ(run({"bell", "--alpha", "0.5"}).code, kExitConfig);
  EXPECT_EQ(run({"measure-demo", "--threshold", "0"}).code, kExitConfig);
  EXPECT_EQ(run({"--config", "/nonexistent/config.json"}).code, kExitConfig);
  EXPECT_EQ(run({"bell", "--mode", "fast"}).code, kExitConfig);
}

TEST(ExitCodes, NumericalAndNoViolation) {
  EXPECT_EQ(run({"bell", "--alpha", "20"}).code, kExitNumerical);
  EXPECT_EQ(run({"fidelity-sweep", "--n-list", "1e6"}).code, kExitNumerical);
  const auto r = run({"bell", "--jitter", "0.3", "--delta-phi-steps", "1", "--delta-phi-max", "0"});
  EXPECT_EQ(r.code, kExitNoViolation);
  EXPECT_NE(r.out.find("delta_phi,S"), std::string::npos);
}

TEST(ExitCodes, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_FALSE(v.out.empty());
}
