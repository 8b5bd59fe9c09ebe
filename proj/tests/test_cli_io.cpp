// SPDX-License-Identifier: Apache-2.0
#include "test_util.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/scenario.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vortexlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vortexlab_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" VORTEXLAB_CLI_PATH "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return std::string(VORTEXLAB_CONFIG_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const fs::path dir = scratch("cfg_" + name);
  fs::create_directories(dir);
  const std::string path = (dir / name).string();
  write_file(path, text);
  return path;
}

// Value column of a two-column CSV by key.
double csv_value(const std::string& path, const std::string& key) {
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (line.substr(0, comma) == key) return std::stod(line.substr(comma + 1));
  }
  throw std::runtime_error("missing key " + key);
}

std::vector<std::string> files_in(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

void expect_config_error(const std::string& json_text, const std::string& fragment) {
  try {
    parse_scenario_config(Json::parse(json_text));
    ADD_FAILURE() << "expected ConfigInvalid for " << json_text;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(ParseToml, TablesArraysAndComments) {
  const Json j = parse_toml(R"(# leading comment
scenario = "solve"   # trailing
[physics]
lambda = 1e4
p = 2
strengths = [1.0, 0.5]
centers = [[0.1, -0.2], [0.3, 0.4]]
[numerics]
deterministic = true
[domain.extra]
name = "x # not a comment"
)");
  EXPECT_EQ(j["scenario"], "solve");
  EXPECT_DOUBLE_EQ(j["physics"]["lambda"].get<double>(), 1e4);
  EXPECT_EQ(j["physics"]["strengths"].size(), 2u);
  EXPECT_DOUBLE_EQ(j["physics"]["centers"][1][0].get<double>(), 0.3);
  EXPECT_EQ(j["numerics"]["deterministic"], true);
  EXPECT_EQ(j["domain"]["extra"]["name"], "x # not a comment");
}

TEST(ParseToml, ReportsLineNumbers) {
  try {
    parse_toml("scenario = \"solve\"\n[physics]\nlambda = \n");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseScenarioConfig, ValidationMessages) {
  expect_config_error(R"({"scenario": "solve", "physics": {"lambda": 1e3, "p": 2, "strengths": [-1], "centers": [[0, 0]]}})",
                      "strength");
  expect_config_error(R"({"scenario": "solve", "physics": {"lambda": 1e3, "p": 2, "strengths": [1], "centers": [[0, 0]], "bogus": 1}})",
                      "physics.bogus");
  expect_config_error(R"({"scenario": "nonsense"})", "scenario");
  expect_config_error(R"({"scenario": "probe", "physics": {"lambda": 1e4, "p": 2, "strengths": [1], "centers": [[0, 0]]}})",
                      "seed");
  expect_config_error(R"({"scenario": "profile", "physics": {"p": -1}})", "p");
  expect_config_error(R"({"scenario": "solve", "domain": {"kind": "boundary_curve", "file": "missing.csv"},
                          "physics": {"lambda": 1e3, "p": 2, "strengths": [1], "centers": [[0, 0]]}})",
                      "missing.csv");
}

TEST(ParseScenarioConfig, ResolvedDefaults) {
  const ScenarioConfig c = parse_scenario_config(
      Json::parse(R"({"scenario": "solve", "physics": {"lambda": 1e3, "p": 2, "strengths": [1], "centers": [[0, 0]]}})"));
  EXPECT_EQ(c.scenario, Scenario::Solve);
  EXPECT_EQ(c.grid_n, 257);
  EXPECT_TRUE(c.resolved.contains("numerics"));
}

TEST(Cli, NegativeStrengthExitsTwoWithoutArtifacts) {
  const fs::path out = scratch("invalid");
  EXPECT_EQ(run_cli("run '" + config("invalid_negative_strength.json") + "' -o '" + out.string() + "'"), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, SolverFailureExitsThree) {
  const std::string cfg = write_temp("empty.json", R"({"scenario": "solve",
    "physics": {"lambda": 10, "p": 2, "strengths": [1], "centers": [[0, 0]], "delta": 0.5},
    "numerics": {"grid_n": 65}})");
  EXPECT_EQ(run_cli("run '" + cfg + "' -o '" + scratch("empty").string() + "'"), 3);
}

TEST(Cli, UnwritableOutputExitsFour) {
  EXPECT_EQ(run_cli("run '" + config("profile_p1.toml") + "' -o /proc/vortexlab_forbidden"), 4);
}

TEST(Cli, ProfileGammaRow) {
  // Bessel zero.
  const fs::path out = scratch("profile");
  ASSERT_EQ(run_cli("run '" + config("profile_p1.toml") + "' -o '" + out.string() + "'"), 0);
  EXPECT_NEAR(csv_value((out / "profile_constants.csv").string(), "gamma"), 2.404825557695773, 1e-10);
  EXPECT_NEAR(csv_value((out / "profile_constants.csv").string(), "edge_times_abs_dphi_edge"), 1.248459, 1e-6);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const fs::path out = scratch("env_out");
  ASSERT_EQ(run_cli("run '" + config("profile_p1.toml") + "'", "VORTEXLAB_OUTPUT_DIR='" + out.string() + "'"), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST(Cli, ByteIdenticalRerunsAndManifest) {
  // identical config and deterministic flag give identical bytes.
  const fs::path a = scratch("solve_a"), b = scratch("solve_b");
  const std::string cfg = write_temp("solve.json", R"({"scenario": "solve",
    "physics": {"lambda": 1e4, "p": 2, "strengths": [1], "centers": [[0.05, 0]], "delta": 0.5},
    "numerics": {"grid_n": 129, "deterministic": true}})");
  ASSERT_EQ(run_cli("run '" + cfg + "' -o '" + a.string() + "'"), 0);
  ASSERT_EQ(run_cli("run '" + cfg + "' -o '" + b.string() + "'"), 0);
  const auto names = files_in(a);
  ASSERT_EQ(names, files_in(b));
  for (const std::string& n : names) {
    if (n == "manifest.json") continue;
    EXPECT_EQ(read_file((a / n).string()), read_file((b / n).string())) << n;
  }
  // The manifests differ only in the echoed output directory.
  Json ma = Json::parse(read_file((a / "manifest.json").string()));
  Json mb = Json::parse(read_file((b / "manifest.json").string()));
  ma["config"]["output"].erase("dir");
  mb["config"]["output"].erase("dir");
  EXPECT_EQ(ma.dump(), mb.dump());

  // Every other file is listed with its hash; the manifest echoes the config.
  const Json m = Json::parse(read_file((a / "manifest.json").string()));
  EXPECT_EQ(m["config"]["scenario"], "solve");
  std::vector<std::string> listed;
  for (const Json& f : m["artifacts"]) {
    const std::string bytes = read_file((a / f["file"].get<std::string>()).string());
    EXPECT_EQ(f["sha256"], sha256_hex(bytes));
    EXPECT_EQ(f["bytes"].get<std::size_t>(), bytes.size());
    listed.push_back(f["file"]);
  }
  listed.push_back("manifest.json");
  std::sort(listed.begin(), listed.end());
  EXPECT_EQ(listed, names);
  for (const char* expect : {"solution.json", "history.csv", "psi.bin", "psi.json", "velocity_x.bin", "pressure.bin"})
    EXPECT_NE(std::find(names.begin(), names.end(), expect), names.end()) << expect;

  // inspect verifies hashes and flags tampering.
  EXPECT_EQ(run_cli("inspect '" + (a / "manifest.json").string() + "'"), 0);
  write_file((a / "history.csv").string(), "tampered\n");
  EXPECT_EQ(run_cli("inspect '" + (a / "manifest.json").string() + "'"), 4);
}

TEST(Cli, SweepRatiosTrendToOne) {
  // 4 pi kappa~ / (kappa ln lambda) moves towards 1 as lambda grows.
  const std::string cfg = write_temp("sweep.json", R"({"scenario": "sweep",
    "physics": {"lambdas": [1e2, 1e3, 1e4], "p": 2, "strengths": [1], "centers": [[0, 0]], "delta": 0.9},
    "numerics": {"grid_n": 129, "deterministic": true}})");
  const fs::path out = scratch("sweep");
  ASSERT_EQ(run_cli("run '" + cfg + "' -o '" + out.string() + "'"), 0);
  std::istringstream in(read_file((out / "asymptotic_report.csv").string()));
  std::string line;
  std::getline(in, line);
  std::vector<double> ratios;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ratios.push_back(std::stod(cells.at(6)));  // strength_ratio
  }
  ASSERT_EQ(ratios.size(), 3u);
  for (int a = 1; a < 3; ++a) EXPECT_LT(std::abs(1.0 - ratios[a]), std::abs(1.0 - ratios[a - 1]));
}

TEST(ArtifactWriter, FieldDumpRoundTrip) {
  const auto grid = GridSystem::build(Domain::unit_disk(), 33);
  Eigen::VectorXd v(grid->node_count());
  for (int f = 0; f < grid->node_count(); ++f) v[f] = std::sin(0.37 * f) * 1e-3 + f;
  const fs::path dir = scratch("dump");
  ArtifactWriter w(dir.string());
  w.field("demo", *grid, v);
  w.manifest(Json::object());
  const FieldDump d = read_field_dump((dir / "demo.bin").string());
  EXPECT_EQ(d.nx, 33);
  EXPECT_EQ(d.ny, 33);
  EXPECT_EQ(d.field_name, "demo");
  ASSERT_EQ(d.values.size(), static_cast<std::size_t>(grid->node_count()));
  for (int f = 0; f < grid->node_count(); ++f) EXPECT_EQ(d.values[f], v[f]);
  EXPECT_DOUBLE_EQ(d.bbox[0], grid->origin().x());
  EXPECT_EQ(fs::file_size(dir / "demo.bin"), 33u * 33u * 8u);
  EXPECT_EQ(run_cli("inspect '" + (dir / "demo.bin").string() + "'"), 0);
}

TEST(ArtifactWriter, UnwritableDirectory) {
  EXPECT_ERROR_CODE(ArtifactWriter("/proc/vortexlab_forbidden/x"), ErrorCode::IoError);
  EXPECT_ERROR_CODE(read_file("/nonexistent/vortexlab.json"), ErrorCode::IoError);
}

TEST(Formatting, ShortestRoundTrip) {
  for (double x : {0.1, 1e-300, 2.404825557695773, -7.5, 1e22}) EXPECT_EQ(std::stod(format_number(x)), x);
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CsvTable t({"a", "b"});
  t.numbers({1.0, 0.5});
  EXPECT_EQ(t.str(), "a,b\n1,0.5\n");
}

namespace {

class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(fs::temp_directory_path() / ("vortexlab_test_" + std::to_string(::getpid())), ec);
  }
};

const auto* const kCleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

}  // namespace
