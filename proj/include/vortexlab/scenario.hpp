// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vortexlab/diagnostics.hpp"
#include "vortexlab/io.hpp"
#include "vortexlab/kirchhoff_routh.hpp"
#include "vortexlab/pohozaev.hpp"
#include "vortexlab/vorticity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vortexlab {

enum class Scenario { Profile, Kr, Solve, Turkington, Compare, Sweep, Pohozaev, Probe, Dynamics };
const char* to_string(Scenario s);

struct DomainConfig {
  std::string kind = "unit_disk";  // unit_disk, ellipse, boundary_curve
  double a = 1.0;                  // ellipse semi-axes
  double b = 1.0;
  int points = 256;                // ellipse boundary samples
  std::string file;                // boundary_curve CSV, resolved against the config directory
};

struct ScenarioConfig {
  Scenario scenario = Scenario::Solve;
  DomainConfig domain;
  GreenOptions green;
  std::vector<double> lambdas;     // one entry unless scenario = sweep
  double p = 2.0;
  std::vector<double> strengths;
  std::vector<Vec2> centers;
  double delta = 0.0;
  int grid_n = 257;
  double pde_tol = 1e-10;
  double mass_tol = 1e-10;
  int max_iterations = 200;
  InnerMethod method = InnerMethod::Newton;
  std::optional<std::uint64_t> seed;
  bool deterministic = true;
  int n_trials = 10;
  double profile_tol = 1e-12;
  double kr_tol = 1e-10;
  bool allow_open = false;         // accept cores whose free boundary meets the mask edge
  TurkingtonOptions turkington;
  double T = 100.0;                // dynamics
  double dt = 1e-3;
  int sample_every = 100;
  Vec2 x0 = Vec2::Zero();          // pohozaev
  Vec2 x1 = Vec2(-0.4, 0.1);
  std::vector<double> taus{0.1};
  int nodes = 256;
  std::string output_dir = "out";
  Json resolved;                   // the full configuration with defaults filled in

  Exec exec() const { return deterministic ? Exec::Serial : Exec::Parallel; }
  SolveSpec solve_spec(double lambda) const;
};

// Validates against the scenario's needs. Throws ConfigInvalid naming the
// offending field; relative file paths resolve against base_dir.
ScenarioConfig parse_scenario_config(const Json& doc, const std::string& base_dir = ".");
Domain build_domain(const DomainConfig& d);

// JSON forms of the main result types.
Json to_json(const GreenDiagnostics& d);
Json to_json(const CriticalPointReport& r);
Json to_json(const CoreMeasurement& m);
Json to_json(const AsymptoticRow& r);
Json to_json(const StreamSolution& s);
Json to_json(const VorticityField& v);
Json to_json(const BernoulliReport& b);
Json to_json(const UniquenessReport& u);
Json to_json(const AnsatzParams& a);
CsvTable profile_table(const RadialProfile& profile);
CsvTable identity_table(const std::vector<GreenIdentityRow>& rows);
CsvTable trajectory_table(const Trajectory& tr);
CsvTable history_table(const std::vector<IterationRecord>& history);

// One row of a lambda sweep: the solution diagnostics at a single lambda.
struct SweepPoint {
  StreamSolution solution;
  std::vector<CoreMeasurement> cores;
  std::vector<AsymptoticRow> rows;
  NecessaryCondition necessary;
  double max_circularity = 0.0;   // max over cores of the circle-fit deviation
  std::vector<double> pohozaev;   // stream Pohozaev residual per core, i = 0
};
SweepPoint sweep_point(const GreenEvaluator& ev, const ScenarioConfig& cfg, const RadialProfile& profile,
                       double lambda);
CsvTable sweep_table(const std::vector<SweepPoint>& points);

// Runs the scenario and writes its artifacts and manifest into out.
void run_scenario(const ScenarioConfig& cfg, ArtifactWriter& out);

// Exit status for an error: 2 for configuration errors, 4 for IO errors, 3 otherwise.
int exit_code_for(ErrorCode code);

}  // namespace vortexlab
