// SPDX-License-Identifier: Apache-2.0
#include "vortexlab/acceptance.hpp"

#include "vortexlab/scenario.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <random>

namespace vortexlab {

namespace {

namespace fs = std::filesystem;

std::string g3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec2 random_point_in_disk(std::mt19937_64& rng, double radius) {
  const double r = radius * std::sqrt(unit_uniform(rng));
  const double a = kTwoPi * unit_uniform(rng);
  return r * Vec2(std::cos(a), std::sin(a));
}

using Clock = std::chrono::steady_clock;

CriterionResult timed(int id, std::string name, double budget, const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.budget = budget;
  r.data = Json::object();
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget > 0.0 && r.seconds > budget) {
    r.pass = false;
    r.detail += " [over the " + g3(budget) + " s budget]";
  }
  return r;
}

ScenarioConfig sweep_config(double p, int grid) {
  ScenarioConfig c;
  c.scenario = Scenario::Sweep;
  c.lambdas = {1e2, 1e3, 1e4};
  c.p = p;
  c.strengths = {1.0};
  c.centers = {Vec2::Zero()};
  c.delta = 0.9;
  c.grid_n = grid;
  return c;
}

bool decreasing(const std::vector<double>& v) {
  for (std::size_t a = 1; a < v.size(); ++a)
    if (!(v[a] < v[a - 1])) return false;
  return true;
}

}  // namespace

std::string format_criterion_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] criterion %2d: ", r.pass ? "PASS" : "FAIL", r.id);
  char tail[48];
  std::snprintf(tail, sizeof tail, " (%.2f s)", r.seconds);
  return std::string(head) + r.name + " | " + r.detail + tail;
}

std::vector<CriterionResult> run_acceptance_criteria(ArtifactWriter& out, const AcceptanceOptions& opt,
                                                     std::ostream* log) {
  std::vector<CriterionResult> results;
  auto record = [&](CriterionResult r) {
    if (log) *log << format_criterion_line(r) << std::endl;
    results.push_back(std::move(r));
  };
  const GreenEvaluator disk = GreenEvaluator::build(Domain::unit_disk());

  record(timed(1, "radial mass identity", 4.0, [&](CriterionResult& r) {
    CsvTable t({"p", "mass", "flux", "relative_error", "seconds_below_1"});
    double worst = 0.0;
    bool fast = true;
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
      const auto t0 = Clock::now();
      const RadialProfile prof = solve_radial_profile(p);
      const double mass = profile_mass(prof);
      const double flux = kTwoPi * prof.edge_radius * std::abs(prof.dphi_edge);
      const double rel = std::abs(mass - flux) / flux;
      const bool ok = std::chrono::duration<double>(Clock::now() - t0).count() < 1.0;
      fast = fast && ok;
      worst = std::max(worst, rel);
      t.numbers({p, mass, flux, rel, ok ? 1.0 : 0.0});
    }
    out.csv("c01_radial_mass.csv", t);
    r.data["max_relative_error"] = worst;
    r.pass = worst <= 1e-6 && fast;
    r.detail = "max relative error " + g3(worst) + " over p in {0.5, 1, 2, 3}" + (fast ? "" : ", a profile took >= 1 s");
  }));

  record(timed(2, "p = 1 eigen constants", 1.0, [&](CriterionResult& r) {
    const RadialProfile prof = solve_radial_profile(1.0);
    const double gamma_ref = boost::math::cyl_bessel_j_zero(0.0, 1);
    const double flux_ref = gamma_ref * boost::math::cyl_bessel_j(1, gamma_ref);
    const double e_gamma = std::abs(prof.edge_radius - gamma_ref);
    const double e_flux = std::abs(prof.edge_radius * std::abs(prof.dphi_edge) - flux_ref);
    r.data = Json{{"gamma", prof.edge_radius}, {"gamma_oracle", gamma_ref}, {"gamma_error", e_gamma},
                  {"flux", prof.edge_radius * std::abs(prof.dphi_edge)}, {"flux_oracle", flux_ref},
                  {"flux_error", e_flux}};
    out.json("c02_eigen_constants.json", r.data);
    r.pass = e_gamma <= 1e-10 && e_flux <= 1e-8;
    r.detail = "|gamma - j0,1| = " + g3(e_gamma) + ", |gamma|phi'(gamma)| - gamma J1(gamma)| = " + g3(e_flux);
  }));

  record(timed(3, "disk Green oracle (MFS)", 10.0, [&](CriterionResult& r) {
    GreenOptions go;
    go.force_mfs = true;
    go.tol = 1e-8;
    const GreenEvaluator mfs = GreenEvaluator::build(Domain::unit_disk(), go);
    double h_err = 0.0;
    for (int a = 0; a <= 16; ++a)
      for (int b = 0; b < 32; ++b) {
        const double rad = 0.8 * a / 16.0, ang = kTwoPi * b / 32.0;
        const Vec2 x = rad * Vec2(std::cos(ang), std::sin(ang));
        h_err = std::max(h_err, std::abs(mfs.robin(x) + std::log(1.0 - rad * rad) / kTwoPi));
      }
    std::mt19937_64 rng(opt.seed);
    double sym = 0.0;
    for (int a = 0; a < 200; ++a) {
      const Vec2 x = random_point_in_disk(rng, 0.8), y = random_point_in_disk(rng, 0.8);
      if ((x - y).norm() < 1e-3) continue;
      sym = std::max(sym, std::abs(mfs.green(x, y) - mfs.green(y, x)));
    }
    r.data = Json{{"green", to_json(mfs.diagnostics())}, {"max_h_error", h_err}, {"max_symmetry_error", sym}};
    out.json("c03_green_oracle.json", r.data);
    r.pass = h_err <= 1e-6 && sym <= 1e-8;
    r.detail = "max |h - h_disk| " + g3(h_err) + " on |x| <= 0.8, max |G(x,y) - G(y,x)| " + g3(sym);
  }));

  record(timed(4, "Green identities for Q", 30.0, [&](CriterionResult& r) {
    std::vector<GreenIdentityRow> all;
    double literal = 0.0, corrected = 0.0, indep = 0.0;
    Json worst_by = Json::object();
    for (const Vec2& x0 : {Vec2(0.0, 0.0), Vec2(0.3, 0.0)})
      for (double tau : {0.1, 0.2}) {
        const auto rows = verify_green_identities(disk, x0, Vec2(-0.4, 0.1), tau);
        for (const GreenIdentityRow& row : rows) {
          const bool is_corrected = row.identity.find("corrected") != std::string::npos;
          (is_corrected ? corrected : literal) = std::max(is_corrected ? corrected : literal, row.residual);
          const double prev = worst_by.contains(row.identity) ? worst_by[row.identity].get<double>() : 0.0;
          worst_by[row.identity] = std::max(prev, row.residual);
        }
        all.insert(all.end(), rows.begin(), rows.end());
        indep = std::max(indep, q_tau_independence(disk, x0, Vec2(-0.4, 0.1), tau));
      }
    out.csv("c04_green_identities.csv", identity_table(all));
    r.data = Json{{"max_residual_by_identity", worst_by},
                  {"max_literal_residual", literal},
                  {"max_corrected_residual", corrected},
                  {"max_tau_dependence", indep}};
    r.pass = literal <= 1e-4 && indep <= 1e-8;
    r.detail = "self_pair " + g3(worst_by["self_pair"].get<double>()) + ", far_pole_pair " +
               g3(worst_by["far_pole_pair"].get<double>()) + ", far_dipole_pair " +
               g3(worst_by["far_dipole_pair"].get<double>()) + " (corrected forms " + g3(corrected) +
               "), tau dependence " + g3(indep);
  }));

  record(timed(5, "Kirchhoff-Routh critical point and gradient", 30.0, [&](CriterionResult& r) {
    const CriticalPointReport cp = find_critical_point(disk, VortexConfig{{Vec2(0.3, 0.2)}, {1.0}});
    const double loc = cp.location[0].norm();
    double hess = 0.0;
    for (double kappa : {1.0, 2.0}) {
      const KrDerivatives d = kr_derivatives(disk, VortexConfig{{cp.location[0]}, {kappa}});
      hess = std::max(hess, (d.hessian - kappa * kappa / kPi * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
    }
    std::mt19937_64 rng(opt.seed + 5);
    CsvTable t({"config", "k", "fd_relative_error"});
    double fd = 0.0;
    for (int c = 0; c < 20; ++c) {
      const int k = 1 + static_cast<int>(rng() % 3);
      VortexConfig vc;
      while (static_cast<int>(vc.points.size()) < k) {
        const Vec2 x = random_point_in_disk(rng, 0.7);
        bool ok = true;
        for (const Vec2& y : vc.points) ok = ok && (x - y).norm() > 0.1;
        if (!ok) continue;
        vc.points.push_back(x);
        vc.strengths.push_back(0.5 + 1.5 * unit_uniform(rng));
      }
      const Eigen::VectorXd g = kr_derivatives(disk, vc).gradient;
      Eigen::VectorXd gfd(2 * k);
      const double step = 1e-5;
      for (int a = 0; a < 2 * k; ++a) {
        VortexConfig plus = vc, minus = vc;
        plus.points[a / 2][a % 2] += step;
        minus.points[a / 2][a % 2] -= step;
        gfd[a] = (kr_value(disk, plus) - kr_value(disk, minus)) / (2.0 * step);
      }
      const double rel = (g - gfd).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff());
      fd = std::max(fd, rel);
      t.numbers({double(c), double(k), rel});
    }
    out.csv("c05_kr_gradient_fd.csv", t);
    r.data = Json{{"critical_point", to_json(cp)}, {"location_norm", loc}, {"hessian_error", hess},
                  {"max_fd_relative_error", fd}};
    out.json("c05_kr.json", r.data);
    r.pass = loc <= 1e-8 && hess <= 1e-5 && fd <= 1e-5;
    r.detail = "|x*| " + g3(loc) + ", Hessian error " + g3(hess) + ", FD gradient error " + g3(fd) + " on 20 configs";
  }));

  record(timed(6, "point-vortex dynamics", 120.0, [&](CriterionResult& r) {
    const std::vector<VortexConfig> cfgs{
        {{Vec2(0.3, 0.0)}, {1.0}},
        {{Vec2(0.3, 0.0), Vec2(-0.3, 0.0)}, {1.0, 1.0}},
        {{Vec2(0.4, 0.0), Vec2(-0.2, 0.2 * std::sqrt(3.0)), Vec2(-0.2, -0.2 * std::sqrt(3.0))}, {1.0, 1.0, 1.0}}};
    CsvTable t({"case", "k", "rho", "relative_W_drift", "max_distance_from_minimum"});
    double drift = 0.0;
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
      const Trajectory tr = integrate_point_vortices(disk, cfgs[c], 100.0, 1e-3, 100);
      double d = 0.0;
      for (double w : tr.energy) d = std::max(d, std::abs(w - tr.energy.front()) / (std::abs(tr.energy.front()) + 1.0));
      drift = std::max(drift, d);
      t.numbers({double(c), double(cfgs[c].k()), 0.0, d, 0.0});
      if (c == 2) out.csv("c06_trajectory_k3.csv", trajectory_table(tr));
    }
    bool stays = true;
    Json excursions = Json::array();
    for (double rho : {0.01, 0.05}) {
      const Trajectory tr = integrate_point_vortices(disk, VortexConfig{{Vec2(rho, 0.0)}, {1.0}}, 100.0, 1e-3, 10);
      double far = 0.0;
      for (const auto& s : tr.states) far = std::max(far, s[0].norm());
      stays = stays && far <= 2.0 * rho;
      excursions.push_back(far / rho);
      t.numbers({double(t.rows()), 1.0, rho, 0.0, far});
    }
    out.csv("c06_dynamics.csv", t);
    r.data = Json{{"max_relative_drift", drift}, {"excursion_over_rho", excursions}};
    r.pass = drift <= 1e-6 && stays;
    r.detail = "max relative W drift " + g3(drift) + " (k = 1, 2, 3), max excursion / rho " +
               g3(excursions[0].get<double>()) + ", " + g3(excursions[1].get<double>()) + " (limit 2)";
  }));

  // Criteria 7 and 10 share the sweeps.
  std::vector<std::vector<SweepPoint>> sweeps;
  const std::vector<double> sweep_ps{1.0, 2.0};
  record(timed(7, "asymptotic laws over lambda in {1e2, 1e3, 1e4}", 1200.0, [&](CriterionResult& r) {
    bool pass = true;
    std::string detail;
    for (double p : sweep_ps) {
      const ScenarioConfig cfg = sweep_config(p, opt.sweep_grid);
      const RadialProfile prof = solve_radial_profile(p);
      std::vector<SweepPoint> pts;
      for (double l : cfg.lambdas) pts.push_back(sweep_point(disk, cfg, prof, l));
      out.csv(p == 1.0 ? "c07_sweep_p1.csv" : "c07_sweep_p2.csv", sweep_table(pts));
      std::vector<double> gap, sr;
      for (const SweepPoint& pt : pts) {
        sr.push_back(pt.rows[0].strength_ratio);
        gap.push_back(std::abs(pt.rows[0].strength_ratio - 1.0));
      }
      const double rr = pts.back().rows[0].radius_ratio;
      const double rr_tol = p == 1.0 ? 0.15 : 0.20;
      const bool mono = decreasing(gap);
      const bool s_ok = mono && gap.back() <= 0.15;
      const bool r_ok = std::abs(rr - 1.0) <= rr_tol;
      pass = pass && s_ok && r_ok;
      r.data[p == 1.0 ? "p1" : "p2"] = Json{{"strength_ratio", sr},
                                            {"strength_ratio_monotone", mono},
                                            {"radius_ratio_at_1e4", rr},
                                            {"radius_ratio_tolerance", rr_tol}};
      detail += std::string(detail.empty() ? "" : "; ") + "p=" + g3(p) + ": strength ratio " + g3(sr[0]) + ", " +
                g3(sr[1]) + ", " + g3(sr[2]) + (mono ? " (monotone)" : " (not monotone)") + ", radius ratio " +
                g3(rr);
      sweeps.push_back(std::move(pts));
    }
    r.pass = pass;
    r.detail = detail + " (targets: strength within 0.15, radius within 0.15 / 0.20)";
  }));

  record(timed(8, "stream function and vorticity maximizer coincide", 600.0, [&](CriterionResult& r) {
    SolveSpec spec;
    spec.centers = {Vec2::Zero()};
    spec.strengths = {1.0};
    spec.lambda = 1e4;
    spec.p = 2.0;
    spec.grid_n = opt.compare_grid;
    spec.exec = Exec::Serial;
    const MethodComparison cmp = compare_methods(disk, spec);
    r.data = Json{{"psi_relative_discrepancy", cmp.psi_relative_discrepancy},
                  {"level_difference", cmp.level_difference},
                  {"support_symdiff_area", cmp.support_symdiff_area},
                  {"support_bound", cmp.support_bound},
                  {"turkington_iterations", cmp.vorticity.iterations},
                  {"cap_active", cmp.vorticity.cap_active}};
    out.json("c08_compare.json", r.data);
    r.pass = cmp.psi_relative_discrepancy <= 0.01;
    r.detail = "relative max-norm difference " + g3(cmp.psi_relative_discrepancy) + ", level difference " +
               g3(cmp.level_difference) + " (grid " + std::to_string(opt.compare_grid) + ")";
  }));

  record(timed(9, "uniqueness probe", 1200.0, [&](CriterionResult& r) {
    bool pass = true;
    std::string detail;
    for (double p : {1.0, 2.0}) {
      SolveSpec spec;
      spec.centers = {Vec2::Zero()};
      spec.strengths = {1.0};
      spec.lambda = 1e4;
      spec.p = p;
      spec.grid_n = opt.probe_grid;
      spec.exec = Exec::Serial;
      const UniquenessReport rep = uniqueness_probe(disk, spec, 10, opt.seed + 9);
      out.json(p == 1.0 ? "c09_probe_p1.json" : "c09_probe_p2.json", to_json(rep));
      int converged = 0;
      for (const ProbeTrial& t : rep.trials) converged += t.converged;
      pass = pass && rep.unique;
      r.data[p == 1.0 ? "p1" : "p2"] = Json{{"max_discrepancy", rep.max_discrepancy},
                                            {"tolerance", rep.tolerance},
                                            {"converged", converged},
                                            {"trials", rep.trials.size()}};
      detail += std::string(detail.empty() ? "" : "; ") + "p=" + g3(p) + ": " + std::to_string(converged) + "/" +
                std::to_string(rep.trials.size()) + " converged, max discrepancy " + g3(rep.max_discrepancy) +
                " (tol " + g3(rep.tolerance) + ")";
    }
    r.pass = pass;
    r.detail = detail;
  }));

  record(timed(10, "necessary condition and circularity", 0.0, [&](CriterionResult& r) {
    if (sweeps.size() != sweep_ps.size()) fail(ErrorCode::InvalidArgument, "the sweeps of criterion 7 did not finish");
    bool pass = true;
    std::string detail;
    for (std::size_t a = 0; a < sweeps.size(); ++a) {
      std::vector<double> ratio, circ;
      for (const SweepPoint& pt : sweeps[a]) {
        ratio.push_back(pt.necessary.ratio);
        circ.push_back(pt.max_circularity);
      }
      const double rmax = *std::max_element(ratio.begin(), ratio.end());
      const bool bounded = rmax <= 1.0;
      const bool circ_ok = circ.back() <= 0.10;
      const bool circ_dec = decreasing(circ);
      pass = pass && bounded && circ_ok && circ_dec;
      r.data[sweep_ps[a] == 1.0 ? "p1" : "p2"] =
          Json{{"grad_W_over_radius", ratio}, {"circularity", circ}, {"circularity_decreasing", circ_dec}};
      detail += std::string(detail.empty() ? "" : "; ") + "p=" + g3(sweep_ps[a]) + ": max |grad W|/r " + g3(rmax) +
                ", circularity " + g3(circ[0]) + ", " + g3(circ[1]) + ", " + g3(circ[2]) +
                (circ_dec ? " (decreasing)" : " (not decreasing)");
    }
    r.pass = pass;
    r.detail = detail;
  }));

  record(timed(11, "Bernoulli property under refinement", 300.0, [&](CriterionResult& r) {
    std::vector<double> stdev;
    CsvTable t({"grid_n", "max_stdev", "components", "velocity_scale"});
    for (int n : {257, 513}) {
      ScenarioConfig cfg = sweep_config(2.0, n);
      SolveSpec spec = cfg.solve_spec(1e3);
      spec.exec = Exec::Serial;
      const StreamSolution sol = solve_stream_function(disk, spec);
      const BernoulliReport b = bernoulli_check(sol, measure_vortex_cores(sol), {}, Exec::Serial);
      stdev.push_back(b.max_stdev);
      t.numbers({double(n), b.max_stdev, double(b.components.size()), b.velocity_scale});
    }
    out.csv("c11_bernoulli.csv", t);
    const double ratio = stdev[0] / stdev[1];
    r.data = Json{{"stdev_257", stdev[0]}, {"stdev_513", stdev[1]}, {"ratio", ratio}};
    r.pass = ratio >= 3.0;
    r.detail = "stdev " + g3(stdev[0]) + " at 257^2, " + g3(stdev[1]) + " at 513^2, ratio " + g3(ratio) +
               " (needs >= 3)";
  }));
  return results;
}

std::vector<CriterionResult> emit_acceptance_suite(const std::string& dir, const AcceptanceOptions& opt,
                                                   std::ostream& log, bool* all_passed) {
  const Json settings{{"seed", opt.seed},
                      {"sweep_grid", opt.sweep_grid},
                      {"compare_grid", opt.compare_grid},
                      {"probe_grid", opt.probe_grid},
                      {"deterministic", true}};
  ArtifactWriter first((fs::path(dir) / "pass_1").string());
  std::vector<CriterionResult> results = run_acceptance_criteria(first, opt, &log);
  first.manifest(settings);

  CriterionResult det = timed(12, "determinism", 0.0, [&](CriterionResult& r) {
    if (!opt.determinism_pass) {
      r.detail = "skipped";
      return;
    }
    ArtifactWriter second((fs::path(dir) / "pass_2").string());
    const std::vector<CriterionResult> again = run_acceptance_criteria(second, opt, nullptr);
    second.manifest(settings);
    const std::string m1 = read_file((fs::path(dir) / "pass_1" / "manifest.json").string());
    const std::string m2 = read_file((fs::path(dir) / "pass_2" / "manifest.json").string());
    int files = 0, differ = 0;
    const Json listed = Json::parse(m1);
    for (const auto& a : listed.at("artifacts")) {
      const std::string name = a.at("file").get<std::string>();
      ++files;
      if (read_file((fs::path(dir) / "pass_1" / name).string()) != read_file((fs::path(dir) / "pass_2" / name).string()))
        ++differ;
    }
    bool same_verdicts = again.size() == results.size();
    for (std::size_t a = 0; same_verdicts && a < again.size(); ++a)
      same_verdicts = again[a].detail == results[a].detail && again[a].pass == results[a].pass;
    r.data = Json{{"files", files}, {"differing_files", differ}, {"manifests_identical", m1 == m2},
                  {"verdicts_identical", same_verdicts}};
    r.pass = files > 0 && m1 == m2 && differ == 0 && same_verdicts;
    r.detail = std::to_string(files) + " artifacts compared across two runs, " + std::to_string(differ) +
               " differ, manifests " + (m1 == m2 ? "identical" : "differ");
  });
  log << format_criterion_line(det) << std::endl;
  results.push_back(det);

  Json summary = Json::array();
  bool ok = true;
  for (const CriterionResult& r : results) {
    ok = ok && r.pass;
    summary.push_back(Json{{"criterion", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                           {"budget_seconds", r.budget}, {"data", r.data}});
  }
  const Json doc{{"settings", settings}, {"all_passed", ok}, {"criteria", summary}};
  write_file((fs::path(dir) / "summary.json").string(), doc.dump(2) + "\n");
  if (all_passed) *all_passed = ok;
  return results;
}

}  // namespace vortexlab
