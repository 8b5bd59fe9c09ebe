// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/scenario.hpp"

#include <filesystem>
#include <set>

namespace vortexlab {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Profile: return "profile";
    case Scenario::Kr: return "kr";
    case Scenario::Solve: return "solve";
    case Scenario::Turkington: return "turkington";
    case Scenario::Compare: return "compare";
    case Scenario::Sweep: return "sweep";
    case Scenario::Pohozaev: return "pohozaev";
    case Scenario::Probe: return "probe";
    case Scenario::Dynamics: return "dynamics";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) {
  if (code == ErrorCode::ConfigInvalid) return 2;
  if (code == ErrorCode::IoError) return 4;
  return 3;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  fail(ErrorCode::ConfigInvalid, field + ": " + what);
}

// Reads one object block, remembering which keys were consumed so unknown
// keys can be rejected.
class Block {
 public:
  Block(const Json& doc, std::string name) : name_(std::move(name)) {
    if (doc.contains(name_)) {
      obj_ = doc.at(name_);
      if (!obj_.is_object()) invalid(name_, "must be a table");
    } else {
      obj_ = Json::object();
    }
  }
  bool has(const std::string& k) const { return obj_.contains(k); }
  std::string field(const std::string& k) const { return name_ + "." + k; }

  double number(const std::string& k, double def) {
    used_.insert(k);
    if (!has(k)) return def;
    return as_number(obj_.at(k), field(k));
  }
  int integer(const std::string& k, int def) {
    used_.insert(k);
    if (!has(k)) return def;
    const Json& v = obj_.at(k);
    if (!v.is_number_integer()) invalid(field(k), "must be an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& k, bool def) {
    used_.insert(k);
    if (!has(k)) return def;
    if (!obj_.at(k).is_boolean()) invalid(field(k), "must be true or false");
    return obj_.at(k).get<bool>();
  }
  std::string text(const std::string& k, const std::string& def) {
    used_.insert(k);
    if (!has(k)) return def;
    if (!obj_.at(k).is_string()) invalid(field(k), "must be a string");
    return obj_.at(k).get<std::string>();
  }
  std::vector<double> numbers(const std::string& k) {
    used_.insert(k);
    if (!has(k)) return {};
    const Json& v = obj_.at(k);
    if (v.is_number()) return {as_number(v, field(k))};
    if (!v.is_array()) invalid(field(k), "must be a number or an array of numbers");
    std::vector<double> out;
    for (std::size_t a = 0; a < v.size(); ++a) out.push_back(as_number(v[a], field(k) + "[" + std::to_string(a) + "]"));
    return out;
  }
  Vec2 point(const std::string& k, const Vec2& def) {
    used_.insert(k);
    if (!has(k)) return def;
    return as_point(obj_.at(k), field(k));
  }
  std::vector<Vec2> points(const std::string& k) {
    used_.insert(k);
    if (!has(k)) return {};
    const Json& v = obj_.at(k);
    if (!v.is_array()) invalid(field(k), "must be an array of [x, y] pairs");
    std::vector<Vec2> out;
    for (std::size_t a = 0; a < v.size(); ++a) out.push_back(as_point(v[a], field(k) + "[" + std::to_string(a) + "]"));
    return out;
  }
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) invalid(field(it.key()), "unknown key");
  }

 private:
  static double as_number(const Json& v, const std::string& f) {
    if (!v.is_number()) invalid(f, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) invalid(f, "must be finite");
    return d;
  }
  static Vec2 as_point(const Json& v, const std::string& f) {
    if (!v.is_array() || v.size() != 2) invalid(f, "must be an [x, y] pair");
    return Vec2(as_number(v[0], f + "[0]"), as_number(v[1], f + "[1]"));
  }
  std::string name_;
  Json obj_;
  std::set<std::string> used_;
};

Json point_json(const Vec2& x) { return Json::array({x.x(), x.y()}); }

Json points_json(const std::vector<Vec2>& xs) {
  Json a = Json::array();
  for (const Vec2& x : xs) a.push_back(point_json(x));
  return a;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Scenario parse_scenario_name(const std::string& s) {
  for (Scenario c : {Scenario::Profile, Scenario::Kr, Scenario::Solve, Scenario::Turkington, Scenario::Compare,
                     Scenario::Sweep, Scenario::Pohozaev, Scenario::Probe, Scenario::Dynamics})
    if (s == to_string(c)) return c;
  invalid("scenario", "unknown scenario '" + s + "'");
}

bool needs_vortices(Scenario s) { return s != Scenario::Profile && s != Scenario::Pohozaev; }
bool needs_pde(Scenario s) {
  return s == Scenario::Solve || s == Scenario::Turkington || s == Scenario::Compare || s == Scenario::Sweep ||
         s == Scenario::Probe;
}

}  // namespace

SolveSpec ScenarioConfig::solve_spec(double lambda) const {
  SolveSpec s;
  s.centers = centers;
  s.strengths = strengths;
  s.lambda = lambda;
  s.p = p;
  s.delta = delta;
  s.grid_n = grid_n;
  s.pde_tol = pde_tol;
  s.mass_tol = mass_tol;
  s.max_iterations = max_iterations;
  s.method = method;
  s.exec = exec();
  return s;
}

Domain build_domain(const DomainConfig& d) {
  if (d.kind == "unit_disk") return Domain::unit_disk();
  if (d.kind == "ellipse") return Domain::ellipse(d.a, d.b, d.points);
  return load_boundary_csv(d.file);
}

ScenarioConfig parse_scenario_config(const Json& doc, const std::string& base_dir) {
  if (!doc.is_object()) invalid("config", "must be a table");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::set<std::string> top{"scenario", "domain", "green",    "physics",
                                           "numerics", "pohozaev", "dynamics", "output"};
    if (!top.count(it.key())) invalid(it.key(), "unknown section");
  }
  ScenarioConfig c;
  if (!doc.contains("scenario") || !doc.at("scenario").is_string()) invalid("scenario", "missing or not a string");
  c.scenario = parse_scenario_name(doc.at("scenario").get<std::string>());

  Block dom(doc, "domain");
  c.domain.kind = dom.text("kind", "unit_disk");
  if (c.domain.kind == "ellipse") {
    c.domain.a = dom.number("a", 1.0);
    c.domain.b = dom.number("b", 0.6);
    c.domain.points = dom.integer("points", 256);
    if (c.domain.a <= 0.0 || c.domain.b <= 0.0) invalid("domain", "ellipse axes must be positive");
    if (c.domain.points < 16) invalid(dom.field("points"), "must be >= 16");
  } else if (c.domain.kind == "boundary_curve") {
    const std::string f = dom.text("file", "");
    if (f.empty()) invalid(dom.field("file"), "required for a boundary_curve domain");
    std::filesystem::path p(f);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    if (!std::filesystem::exists(p)) invalid(dom.field("file"), "file does not exist: " + p.string());
    c.domain.file = p.string();
  } else if (c.domain.kind != "unit_disk") {
    invalid(dom.field("kind"), "must be unit_disk, ellipse or boundary_curve");
  }
  dom.finish();

  Block green(doc, "green");
  c.green.tol = green.number("tol", c.green.tol);
  c.green.force_mfs = green.boolean("force_mfs", c.green.force_mfs);
  c.green.max_sources = green.integer("max_sources", c.green.max_sources);
  if (c.green.tol <= 0.0) invalid(green.field("tol"), "must be positive");
  if (c.green.max_sources < 64) invalid(green.field("max_sources"), "must be >= 64");
  green.finish();

  Block phys(doc, "physics");
  const bool sweep = c.scenario == Scenario::Sweep;
  if (sweep) {
    c.lambdas = phys.numbers("lambdas");
    if (c.lambdas.empty()) invalid(phys.field("lambdas"), "required for a sweep");
  } else {
    c.lambdas = phys.numbers("lambda");
    if (c.lambdas.size() > 1) invalid(phys.field("lambda"), "must be a single number");
    if (c.lambdas.empty()) c.lambdas = {1e3};
  }
  for (double l : c.lambdas)
    if (l <= 1.0) invalid(phys.field(sweep ? "lambdas" : "lambda"), "must exceed 1");
  c.p = phys.number("p", c.p);
  if (c.p <= 0.0) invalid(phys.field("p"), "must be positive");
  c.strengths = phys.numbers("strengths");
  c.centers = phys.points("centers");
  c.delta = phys.number("delta", 0.0);
  if (c.delta < 0.0) invalid(phys.field("delta"), "must be >= 0 (0 selects the default)");
  if (needs_vortices(c.scenario)) {
    if (c.centers.empty()) invalid(phys.field("centers"), "at least one center is required");
    if (c.strengths.size() != c.centers.size()) invalid(phys.field("strengths"), "needs one strength per center");
  }
  for (std::size_t j = 0; j < c.strengths.size(); ++j)
    if (!(c.strengths[j] > 0.0)) invalid(phys.field("strengths") + "[" + std::to_string(j) + "]", "must be positive");
  phys.finish();

  Block num(doc, "numerics");
  c.grid_n = num.integer("grid_n", c.grid_n);
  c.pde_tol = num.number("pde_tol", c.pde_tol);
  c.mass_tol = num.number("mass_tol", c.mass_tol);
  c.max_iterations = num.integer("max_iterations", c.max_iterations);
  const std::string method = num.text("method", "newton");
  if (method == "newton") c.method = InnerMethod::Newton;
  else if (method == "picard") c.method = InnerMethod::Picard;
  else invalid(num.field("method"), "must be newton or picard");
  if (num.has("seed")) {
    const double s = num.number("seed", 0.0);
    if (s < 0.0 || s != std::floor(s)) invalid(num.field("seed"), "must be a non-negative integer");
    c.seed = static_cast<std::uint64_t>(s);
  }
  c.deterministic = num.boolean("deterministic", c.deterministic);
  c.n_trials = num.integer("n_trials", c.n_trials);
  c.profile_tol = num.number("profile_tol", c.profile_tol);
  c.kr_tol = num.number("kr_tol", c.kr_tol);
  c.allow_open = num.boolean("allow_open", c.allow_open);
  c.turkington.cap = num.number("turkington_cap", c.turkington.cap);
  c.turkington.tol = num.number("turkington_tol", c.turkington.tol);
  c.turkington.max_iterations = num.integer("turkington_max_iterations", c.turkington.max_iterations);
  c.turkington.restrict_to_mask = num.boolean("turkington_restrict_to_mask", c.turkington.restrict_to_mask);
  if (c.grid_n < 17) invalid(num.field("grid_n"), "must be >= 17");
  if (c.pde_tol <= 0.0 || c.mass_tol <= 0.0) invalid(num.field("pde_tol"), "tolerances must be positive");
  if (c.max_iterations < 1) invalid(num.field("max_iterations"), "must be >= 1");
  if (c.n_trials < 1) invalid(num.field("n_trials"), "must be >= 1");
  if (c.profile_tol <= 0.0 || c.kr_tol <= 0.0) invalid(num.field("profile_tol"), "tolerances must be positive");
  if (c.scenario == Scenario::Probe && !c.seed) invalid(num.field("seed"), "required when randomness is used");
  num.finish();

  Block poh(doc, "pohozaev");
  c.x0 = poh.point("x0", c.x0);
  c.x1 = poh.point("x1", c.x1);
  if (poh.has("tau")) c.taus = poh.numbers("tau");
  c.nodes = poh.integer("nodes", c.nodes);
  for (double t : c.taus)
    if (t <= 0.0) invalid(poh.field("tau"), "must be positive");
  if (c.taus.empty()) invalid(poh.field("tau"), "needs at least one radius");
  if (c.nodes < 64) invalid(poh.field("nodes"), "must be >= 64");
  poh.finish();

  Block dyn(doc, "dynamics");
  c.T = dyn.number("T", c.T);
  c.dt = dyn.number("dt", c.dt);
  c.sample_every = dyn.integer("sample_every", c.sample_every);
  if (c.T <= 0.0 || c.dt <= 0.0) invalid(dyn.field("dt"), "T and dt must be positive");
  if (c.sample_every < 1) invalid(dyn.field("sample_every"), "must be >= 1");
  dyn.finish();

  Block out(doc, "output");
  c.output_dir = out.text("dir", c.output_dir);
  out.finish();

  // Domain-dependent checks, reported as configuration errors.
  if (needs_pde(c.scenario)) {
    try {
      const Domain d = build_domain(c.domain);
      for (double l : c.lambdas) validate_spec(d, c.solve_spec(l));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      fail(ErrorCode::ConfigInvalid, std::string("physics: ") + e.what());
    }
  }
  if (c.scenario == Scenario::Turkington && c.centers.size() != 1)
    invalid("physics.centers", "turkington supports exactly one vortex");

  c.resolved = Json{
      {"scenario", to_string(c.scenario)},
      {"domain", {{"kind", c.domain.kind}, {"a", c.domain.a}, {"b", c.domain.b}, {"points", c.domain.points},
                  {"file", c.domain.file}}},
      {"green", {{"tol", c.green.tol}, {"force_mfs", c.green.force_mfs}, {"max_sources", c.green.max_sources}}},
      {"physics", {{sweep ? "lambdas" : "lambda", sweep ? Json(c.lambdas) : Json(c.lambdas[0])},
                   {"p", c.p},
                   {"strengths", c.strengths},
                   {"centers", points_json(c.centers)},
                   {"delta", c.delta}}},
      {"numerics", {{"grid_n", c.grid_n},
                    {"pde_tol", c.pde_tol},
                    {"mass_tol", c.mass_tol},
                    {"max_iterations", c.max_iterations},
                    {"method", method},
                    {"seed", c.seed ? Json(*c.seed) : Json(nullptr)},
                    {"deterministic", c.deterministic},
                    {"n_trials", c.n_trials},
                    {"profile_tol", c.profile_tol},
                    {"kr_tol", c.kr_tol},
                    {"allow_open", c.allow_open},
                    {"turkington_cap", c.turkington.cap},
                    {"turkington_tol", c.turkington.tol},
                    {"turkington_max_iterations", c.turkington.max_iterations},
                    {"turkington_restrict_to_mask", c.turkington.restrict_to_mask}}},
      {"pohozaev", {{"x0", point_json(c.x0)}, {"x1", point_json(c.x1)}, {"tau", c.taus}, {"nodes", c.nodes}}},
      {"dynamics", {{"T", c.T}, {"dt", c.dt}, {"sample_every", c.sample_every}}},
      {"output", {{"dir", c.output_dir}}}};
  return c;
}

Json to_json(const GreenDiagnostics& d) {
  return Json{{"method", to_string(d.method)}, {"n_sources", d.n_sources}, {"fit_residual", d.fit_residual},
              {"fd_step", d.fd_step}};
}

Json to_json(const CriticalPointReport& r) {
  return Json{{"location", points_json(r.location)},
              {"grad_norm", r.grad_norm},
              {"hessian_eigenvalues", vector_json(r.hessian_eigenvalues)},
              {"classification", to_string(r.classification)},
              {"iterations", r.iterations}};
}

Json to_json(const CoreMeasurement& m) {
  return Json{{"peak", point_json(m.peak)},
              {"peak_value", m.peak_value},
              {"radius", m.radius},
              {"cut_level", m.cut_level},
              {"mass", m.mass},
              {"area", m.area},
              {"contour_length", m.contour_length},
              {"contour_points", m.contour.size()},
              {"circle_center", point_json(m.circle.center)},
              {"circle_radius", m.circle.radius},
              {"circularity_deviation", m.circle.max_relative_deviation},
              {"open", m.open}};
}

Json to_json(const AsymptoticRow& r) {
  return Json{{"vortex", r.vortex},     {"lambda", r.lambda},
              {"p", r.p},               {"strength", r.strength},
              {"cut_level", r.cut_level}, {"radius", r.radius},
              {"strength_ratio", r.strength_ratio}, {"radius_ratio", r.radius_ratio},
              {"size_monitor", r.size_monitor}};
}

Json to_json(const StreamSolution& s) {
  return Json{{"lambda", s.lambda},
              {"p", s.p},
              {"delta", s.delta},
              {"grid_n", s.grid->n()},
              {"h", s.grid->h()},
              {"centers", points_json(s.centers)},
              {"strengths", s.strengths},
              {"cut_levels", s.cut_levels},
              {"masses", s.masses},
              {"pde_residual", s.pde_residual},
              {"mass_error", s.mass_error},
              {"iterations", static_cast<int>(s.history.size()) - 1},
              {"warnings", s.warnings}};
}

Json to_json(const VorticityField& v) {
  return Json{{"level", v.level},
              {"mu", v.mu},
              {"cap", v.cap},
              {"energy", v.energy},
              {"iterations", v.iterations},
              {"omega_change", v.omega_change},
              {"mass", v.mass},
              {"cap_active", v.cap_active},
              {"warnings", v.warnings}};
}

Json to_json(const BernoulliReport& b) {
  Json comps = Json::array();
  for (const BernoulliComponent& c : b.components)
    comps.push_back(Json{{"nodes", c.nodes}, {"mean", c.mean}, {"stdev", c.stdev}});
  return Json{{"max_stdev", b.max_stdev}, {"velocity_scale", b.velocity_scale}, {"components", comps}};
}

Json to_json(const UniquenessReport& u) {
  Json trials = Json::array();
  for (const ProbeTrial& t : u.trials)
    trials.push_back(Json{{"label", t.label},
                          {"converged", t.converged},
                          {"error", t.error},
                          {"cut_levels", t.cut_levels},
                          {"iterations", t.iterations}});
  Json table = Json::array();
  for (const ProbeDiscrepancy& d : u.table) table.push_back(Json{{"a", d.a}, {"b", d.b}, {"value", d.value}});
  return Json{{"trials", trials},
              {"table", table},
              {"max_discrepancy", u.max_discrepancy},
              {"tolerance", u.tolerance},
              {"all_converged", u.all_converged},
              {"unique", u.unique}};
}

Json to_json(const AnsatzParams& a) {
  return Json{{"eps", a.eps},
              {"R", a.R},
              {"p", a.p()},
              {"centers", points_json(a.centers)},
              {"targets", points_json(a.targets)},
              {"amplitudes", a.amplitudes},
              {"core_radii", a.core_radii},
              {"cut_levels", a.cut_levels},
              {"iterations", a.iterations},
              {"residual", a.residual}};
}

CsvTable profile_table(const RadialProfile& profile) {
  CsvTable t({"r", "phi", "dphi"});
  for (std::size_t a = 0; a < profile.r.size(); ++a) t.numbers({profile.r[a], profile.phi[a], profile.dphi[a]});
  return t;
}

CsvTable identity_table(const std::vector<GreenIdentityRow>& rows) {
  CsvTable t({"identity", "i", "j", "tau", "q", "claimed", "residual"});
  for (const GreenIdentityRow& r : rows)
    t.row({r.identity, std::to_string(r.i), std::to_string(r.j), format_number(r.tau), format_number(r.q),
           format_number(r.claimed), format_number(r.residual)});
  return t;
}

CsvTable trajectory_table(const Trajectory& tr) {
  std::vector<std::string> header{"t"};
  const std::size_t k = tr.states.empty() ? 0 : tr.states[0].size();
  for (std::size_t j = 1; j <= k; ++j) {
    header.push_back("x" + std::to_string(j) + "_1");
    header.push_back("x" + std::to_string(j) + "_2");
  }
  header.push_back("W");
  CsvTable t(header);
  for (std::size_t s = 0; s < tr.t.size(); ++s) {
    std::vector<double> row{tr.t[s]};
    for (const Vec2& x : tr.states[s]) {
      row.push_back(x.x());
      row.push_back(x.y());
    }
    row.push_back(tr.energy[s]);
    t.numbers(row);
  }
  return t;
}

CsvTable history_table(const std::vector<IterationRecord>& history) {
  CsvTable t({"iteration", "pde_residual", "mass_error", "step", "ascent"});
  for (const IterationRecord& r : history)
    t.row({std::to_string(r.iteration), format_number(r.pde_residual), format_number(r.mass_error),
           format_number(r.step), r.ascent ? "1" : "0"});
  return t;
}

SweepPoint sweep_point(const GreenEvaluator& ev, const ScenarioConfig& cfg, const RadialProfile& profile,
                       double lambda) {
  SweepPoint pt;
  pt.solution = solve_stream_function(ev, cfg.solve_spec(lambda));
  pt.cores = measure_vortex_cores(pt.solution, cfg.allow_open);
  pt.rows = asymptotic_report(pt.solution, pt.cores, profile);
  pt.necessary = necessary_condition_check(ev, pt.cores, cfg.strengths);
  for (std::size_t j = 0; j < pt.cores.size(); ++j) {
    pt.max_circularity = std::max(pt.max_circularity, pt.cores[j].circle.max_relative_deviation);
    double r = std::numeric_limits<double>::quiet_NaN();
    try {
      r = stream_pohozaev_residual(pt.solution, pt.cores, static_cast<int>(j), 0);
    } catch (const Error&) {
    }
    pt.pohozaev.push_back(r);
  }
  return pt;
}

CsvTable sweep_table(const std::vector<SweepPoint>& points) {
  CsvTable t({"lambda", "p", "vortex", "strength", "cut_level", "radius", "strength_ratio", "radius_ratio",
              "size_monitor", "peak_x", "peak_y", "circularity", "grad_W_norm", "grad_W_over_radius",
              "pohozaev_residual"});
  for (const SweepPoint& pt : points)
    for (const AsymptoticRow& r : pt.rows) {
      const CoreMeasurement& m = pt.cores[r.vortex];
      t.numbers({r.lambda, r.p, double(r.vortex), r.strength, r.cut_level, r.radius, r.strength_ratio,
                 r.radius_ratio, r.size_monitor, m.peak.x(), m.peak.y(), m.circle.max_relative_deviation,
                 pt.necessary.grad_norm, pt.necessary.ratio, pt.pohozaev[r.vortex]});
    }
  return t;
}

namespace {

GreenEvaluator build_evaluator(const ScenarioConfig& cfg) {
  return GreenEvaluator::build(build_domain(cfg.domain), cfg.green);
}

void write_solution(ArtifactWriter& out, const GreenEvaluator& ev, const ScenarioConfig& cfg,
                    const StreamSolution& sol, const RadialProfile& profile) {
  const auto cores = measure_vortex_cores(sol, cfg.allow_open);
  Json cores_json = Json::array();
  for (const CoreMeasurement& m : cores) cores_json.push_back(to_json(m));
  Json rows = Json::array();
  for (const AsymptoticRow& r : asymptotic_report(sol, cores, profile)) rows.push_back(to_json(r));
  const NecessaryCondition nc = necessary_condition_check(ev, cores, sol.strengths);
  const FlowFields flow = recover_velocity_pressure(sol, cfg.exec());
  Json report{{"solution", to_json(sol)},
              {"cores", cores_json},
              {"asymptotics", rows},
              {"necessary_condition", {{"gradient", vector_json(nc.gradient)},
                                       {"grad_norm", nc.grad_norm},
                                       {"ratio_to_radius", nc.ratio}}},
              {"max_divergence", flow.max_divergence},
              {"max_speed", flow.max_speed}};
  try {
    report["bernoulli"] = to_json(bernoulli_check(sol, cores, {}, cfg.exec()));
    const AnsatzComparison cmp = residual_against_ansatz(ev, sol, cores, profile);
    report["ansatz"] = Json{{"c", cmp.scaling.c},
                            {"lambda_bar", cmp.scaling.lambda_bar},
                            {"eps", cmp.scaling.eps},
                            {"params", to_json(cmp.params)},
                            {"max_norm", cmp.residual.max_norm},
                            {"core_norm", cmp.residual.core_norm},
                            {"scaled", cmp.residual.scaled}};
  } catch (const Error& e) {
    report["ansatz_error"] = e.what();
  }
  out.json("solution.json", report);
  out.csv("history.csv", history_table(sol.history));
  out.field("psi", *sol.grid, sol.psi);
  out.field("velocity_x", *sol.grid, flow.vx);
  out.field("velocity_y", *sol.grid, flow.vy);
  out.field("pressure", *sol.grid, flow.pressure);
}

}  // namespace

void run_scenario(const ScenarioConfig& cfg, ArtifactWriter& out) {
  switch (cfg.scenario) {
    case Scenario::Profile: {
      const RadialProfile prof = solve_radial_profile(cfg.p, cfg.profile_tol);
      out.csv("profile.csv", profile_table(prof));
      CsvTable constants({"quantity", "value"});
      const double flux = kTwoPi * prof.edge_radius * std::abs(prof.dphi_edge);
      constants.row({"p", format_number(prof.p)});
      constants.row({prof.kind == ProfileKind::Eigen ? "gamma" : "edge_radius", format_number(prof.edge_radius)});
      constants.row({"dphi_edge", format_number(prof.dphi_edge)});
      constants.row({"edge_times_abs_dphi_edge", format_number(prof.edge_radius * std::abs(prof.dphi_edge))});
      constants.row({"phi0", format_number(prof.phi0)});
      constants.row({"mass", format_number(profile_mass(prof))});
      constants.row({"flux", format_number(flux)});
      constants.row({"mass_identity_relative_error", format_number(std::abs(profile_mass(prof) - flux) / flux)});
      constants.row({"ode_residual", format_number(profile_ode_residual(prof))});
      out.csv("profile_constants.csv", constants);
      break;
    }
    case Scenario::Kr: {
      const GreenEvaluator ev = build_evaluator(cfg);
      const VortexConfig vc{cfg.centers, cfg.strengths};
      const KrDerivatives d = kr_derivatives(ev, vc);
      CriticalPointOptions opt;
      opt.tol = cfg.kr_tol;
      const CriticalPointReport rep = find_critical_point(ev, vc, opt);
      out.json("green.json", to_json(ev.diagnostics()));
      out.json("kr.json", Json{{"initial", {{"points", points_json(vc.points)},
                                            {"strengths", vc.strengths},
                                            {"W", kr_value(ev, vc)},
                                            {"gradient", vector_json(d.gradient)}}},
                               {"critical_point", to_json(rep)},
                               {"W_at_critical_point", kr_value(ev, VortexConfig{rep.location, vc.strengths})}});
      break;
    }
    case Scenario::Solve: {
      const GreenEvaluator ev = build_evaluator(cfg);
      const RadialProfile prof = solve_radial_profile(cfg.p, cfg.profile_tol);
      const StreamSolution sol = solve_stream_function(ev, cfg.solve_spec(cfg.lambdas[0]));
      out.json("green.json", to_json(ev.diagnostics()));
      write_solution(out, ev, cfg, sol, prof);
      break;
    }
    case Scenario::Turkington: {
      const GreenEvaluator ev = build_evaluator(cfg);
      const VorticityField vf = maximize_vorticity_energy(ev, cfg.solve_spec(cfg.lambdas[0]), cfg.turkington);
      out.json("turkington.json", to_json(vf));
      CsvTable e({"iteration", "energy"});
      for (std::size_t a = 0; a < vf.energy_history.size(); ++a)
        e.row({std::to_string(a), format_number(vf.energy_history[a])});
      out.csv("energy_history.csv", e);
      out.field("psi", *vf.grid, vf.psi);
      out.field("omega", *vf.grid, vf.grid->scatter(vf.omega));
      break;
    }
    case Scenario::Compare: {
      const GreenEvaluator ev = build_evaluator(cfg);
      const MethodComparison cmp = compare_methods(ev, cfg.solve_spec(cfg.lambdas[0]), cfg.turkington);
      out.json("compare.json", Json{{"stream", to_json(cmp.stream)},
                                    {"vorticity", to_json(cmp.vorticity)},
                                    {"psi_relative_discrepancy", cmp.psi_relative_discrepancy},
                                    {"level_difference", cmp.level_difference},
                                    {"support_symdiff_area", cmp.support_symdiff_area},
                                    {"support_bound", cmp.support_bound}});
      out.field("psi_stream", *cmp.stream.grid, cmp.stream.psi);
      out.field("psi_vorticity", *cmp.stream.grid, cmp.vorticity.psi);
      break;
    }
    case Scenario::Sweep: {
      const GreenEvaluator ev = build_evaluator(cfg);
      const RadialProfile prof = solve_radial_profile(cfg.p, cfg.profile_tol);
      std::vector<SweepPoint> pts;
      for (double l : cfg.lambdas) pts.push_back(sweep_point(ev, cfg, prof, l));
      out.csv("asymptotic_report.csv", sweep_table(pts));
      Json sols = Json::array();
      for (const SweepPoint& pt : pts) sols.push_back(to_json(pt.solution));
      out.json("sweep.json", Json{{"solutions", sols}});
      break;
    }
    case Scenario::Pohozaev: {
      const GreenEvaluator ev = build_evaluator(cfg);
      std::vector<GreenIdentityRow> rows;
      Json indep = Json::array();
      for (double tau : cfg.taus) {
        const auto r = verify_green_identities(ev, cfg.x0, cfg.x1, tau, cfg.nodes);
        rows.insert(rows.end(), r.begin(), r.end());
        indep.push_back(Json{{"tau", tau}, {"max_q_difference_tau_vs_half", q_tau_independence(ev, cfg.x0, cfg.x1, tau, cfg.nodes)}});
      }
      out.csv("green_identities.csv", identity_table(rows));
      out.json("q_tau_independence.json", Json{{"rows", indep}});
      break;
    }
    case Scenario::Probe: {
      const GreenEvaluator ev = build_evaluator(cfg);
      const UniquenessReport rep = uniqueness_probe(ev, cfg.solve_spec(cfg.lambdas[0]), cfg.n_trials, *cfg.seed);
      out.json("probe.json", to_json(rep));
      CsvTable t({"a", "b", "relative_max_norm"});
      for (const ProbeDiscrepancy& d : rep.table)
        t.row({std::to_string(d.a), std::to_string(d.b), format_number(d.value)});
      out.csv("probe_table.csv", t);
      break;
    }
    case Scenario::Dynamics: {
      const GreenEvaluator ev = build_evaluator(cfg);
      const Trajectory tr = integrate_point_vortices(ev, VortexConfig{cfg.centers, cfg.strengths}, cfg.T, cfg.dt,
                                                     cfg.sample_every);
      double drift = 0.0;
      for (double w : tr.energy)
        drift = std::max(drift, std::abs(w - tr.energy.front()) / (std::abs(tr.energy.front()) + 1.0));
      out.csv("trajectory.csv", trajectory_table(tr));
      out.json("dynamics.json", Json{{"samples", tr.t.size()}, {"relative_W_drift", drift}});
      break;
    }
  }
  out.manifest(cfg.resolved);
}

}  // namespace vortexlab
