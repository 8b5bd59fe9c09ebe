// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/acceptance.hpp"
#include "vortexlab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace vortexlab;

namespace {

int run_command(const std::string& config_path, const std::string& out_flag) {
  const Json doc = load_config_file(config_path);
  ScenarioConfig cfg = parse_scenario_config(doc, fs::path(config_path).parent_path().string());
  if (!out_flag.empty()) {
    cfg.output_dir = out_flag;
  } else if (const char* env = std::getenv("VORTEXLAB_OUTPUT_DIR"); env && *env) {
    cfg.output_dir = env;
  }
  cfg.resolved["output"]["dir"] = cfg.output_dir;
  ArtifactWriter out(cfg.output_dir);
  run_scenario(cfg, out);
  std::cout << "scenario " << to_string(cfg.scenario) << " finished; artifacts in " << cfg.output_dir << "\n";
  return 0;
}

void inspect_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string header, line;
  std::getline(in, header);
  std::size_t rows = 0;
  std::string first, last;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    last = line;
    ++rows;
  }
  std::cout << "csv " << path << "\ncolumns: " << header << "\nrows: " << rows << "\n";
  if (rows) std::cout << "first: " << first << "\nlast:  " << last << "\n";
}

void inspect_dump(const std::string& path) {
  const FieldDump d = read_field_dump(path);
  double lo = d.values.empty() ? 0.0 : d.values[0], hi = lo, sum = 0.0;
  for (double v : d.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  std::cout << "field " << d.field_name << ": " << d.nx << " x " << d.ny << ", bbox [" << d.bbox[0] << ", "
            << d.bbox[1] << "] - [" << d.bbox[2] << ", " << d.bbox[3] << "]\nmin " << lo << ", max " << hi
            << ", mean " << sum / std::max<std::size_t>(1, d.values.size()) << "\n";
}

int inspect_json(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::IoError, path + ": " + e.what());
  }
  if (j.contains("artifacts") && j.contains("config")) {
    // Manifest: verify every listed artifact.
    const fs::path dir = fs::path(path).parent_path();
    int bad = 0;
    for (const auto& a : j.at("artifacts")) {
      const std::string name = a.at("file").get<std::string>();
      std::string status = "ok";
      try {
        if (sha256_hex(read_file((dir / name).string())) != a.at("sha256").get<std::string>()) status = "HASH MISMATCH";
      } catch (const Error&) {
        status = "MISSING";
      }
      if (status != "ok") ++bad;
      std::cout << status << "  " << name << "  " << a.at("bytes").get<std::size_t>() << " bytes\n";
    }
    std::cout << "scenario: " << j.at("config").value("scenario", std::string("acceptance")) << ", "
              << j.at("artifacts").size() << " artifacts, " << bad << " problems\n";
    return bad ? 4 : 0;
  }
  if (fs::exists(fs::path(path).replace_extension(".bin")) && j.contains("field_name")) {
    inspect_dump(path);
    return 0;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int inspect_command(const std::string& path) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".csv") {
    inspect_csv(path);
    return 0;
  }
  if (ext == ".bin") {
    inspect_dump(path);
    return 0;
  }
  return inspect_json(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vortexlab: concentrated steady vortices in planar domains"};
  app.require_subcommand(1);

  std::string config_path, out_flag;
  auto* run = app.add_subcommand("run", "Run the scenario described by a JSON or TOML config");
  run->add_option("config", config_path, "Scenario config file")->required();
  run->add_option("-o,--out", out_flag, "Output directory (overrides the config and VORTEXLAB_OUTPUT_DIR)");

  std::string accept_dir;
  AcceptanceOptions aopt;
  bool skip_determinism = false;
  auto* accept = app.add_subcommand("accept", "Run the acceptance suite and write a pass/fail summary");
  accept->add_option("dir", accept_dir, "Output directory")->required();
  accept->add_option("--seed", aopt.seed, "Seed for the randomized checks");
  accept->add_flag("--skip-determinism", skip_determinism, "Do not rerun the suite for the determinism check");

  std::string artifact;
  auto* inspect = app.add_subcommand("inspect", "Summarize an artifact, or verify a manifest");
  inspect->add_option("artifact", artifact, "CSV, JSON, field dump or manifest.json")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_command(config_path, out_flag);
    if (*accept) {
      aopt.determinism_pass = !skip_determinism;
      bool ok = false;
      emit_acceptance_suite(accept_dir, aopt, std::cout, &ok);
      return ok ? 0 : 1;
    }
    return inspect_command(artifact);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "IoError: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}
