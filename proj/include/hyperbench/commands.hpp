#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hyperbench/sampling.hpp"
#include "hyperbench/scenarios.hpp"
#include "hyperbench/vtk.hpp"

// Command bodies behind the CLI front end.  Exit codes: 0 success,
// 1 check/verdict failure, 2 configuration error, 3 numerical failure.

namespace hyperbench {

struct CheckOptions {
  std::string filter;
  bool inject_tangent_error = false;  // self-test hook: scales C_1111 by 1.01
};

struct RunConfig {
  std::string scenario;
  std::string pathway = "total";
  std::optional<int> nx, ny, steps;
  std::string out_dir = "out";
  bool vtk = false;
  int csv_precision = 17;
  int threads = 1;
  // point-study inputs
  std::string path = "dilation";  // dilation | shear | schedule file
  double amount = 0.2;
  int point_steps = 1000;
  double mu = 1.0;
  double kappa = 0.78;
  // newton overrides
  std::optional<double> newton_rel_tol, newton_abs_floor;
  std::optional<int> newton_max_iter;
  std::optional<bool> newton_line_search;
};

inline void load_run_config_file(const std::string& file, RunConfig& rc) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Config cfg = Config::parse(ss.str());

  cfg.mark_section_known("run");
  if (const std::string* v = cfg.get("run", "scenario")) rc.scenario = *v;
  if (const std::string* v = cfg.get("run", "pathway")) rc.pathway = *v;
  if (const std::string* v = cfg.get("run", "nx")) rc.nx = int(parse_int(*v));
  if (const std::string* v = cfg.get("run", "ny")) rc.ny = int(parse_int(*v));
  if (const std::string* v = cfg.get("run", "steps")) rc.steps = int(parse_int(*v));
  if (const std::string* v = cfg.get("run", "out")) rc.out_dir = *v;
  if (const std::string* v = cfg.get("run", "vtk")) {
    if (*v == "on")
      rc.vtk = true;
    else if (*v == "off")
      rc.vtk = false;
    else
      throw ConfigError("vtk must be 'on' or 'off'");
  }
  if (const std::string* v = cfg.get("run", "csv_precision")) {
    rc.csv_precision = int(parse_int(*v));
    if (rc.csv_precision < 1 || rc.csv_precision > 17)
      throw ConfigError("csv_precision must lie in [1, 17]");
  }
  if (const std::string* v = cfg.get("run", "threads")) {
    rc.threads = int(parse_int(*v));
    if (rc.threads < 1) throw ConfigError("threads must be >= 1");
  }
  if (const std::string* v = cfg.get("run", "path")) rc.path = *v;
  if (const std::string* v = cfg.get("run", "amount")) rc.amount = parse_double(*v);
  if (const std::string* v = cfg.get("run", "point_steps"))
    rc.point_steps = int(parse_int(*v));
  if (const std::string* v = cfg.get("run", "mu_mpa")) rc.mu = parse_double(*v);
  if (const std::string* v = cfg.get("run", "kappa_mpa")) rc.kappa = parse_double(*v);

  if (cfg.has_section("newton")) {
    if (const std::string* v = cfg.get("newton", "rel_tol")) rc.newton_rel_tol = parse_double(*v);
    if (const std::string* v = cfg.get("newton", "abs_floor_n"))
      rc.newton_abs_floor = parse_double(*v);
    if (const std::string* v = cfg.get("newton", "max_iter"))
      rc.newton_max_iter = int(parse_int(*v));
    if (const std::string* v = cfg.get("newton", "line_search")) {
      if (*v == "on")
        rc.newton_line_search = true;
      else if (*v == "off")
        rc.newton_line_search = false;
      else
        throw ConfigError("line_search must be 'on' or 'off'");
    }
  }
  cfg.reject_unknown();
}

inline Scenario resolve_scenario(const RunConfig& rc) {
  if (rc.scenario.empty()) throw ConfigError("no scenario given (builtin name or file path)");
  Scenario s = [&] {
    for (const std::string& b : builtin_names())
      if (b == rc.scenario) return builtin(rc.scenario);
    std::ifstream in(rc.scenario);
    if (!in) throw ConfigError("scenario '" + rc.scenario + "' is neither builtin nor a file");
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_text(ss.str());
  }();

  if (rc.nx || rc.ny) {
    if (s.kind != ScenarioKind::Fem)
      throw ConfigError("mesh overrides apply only to fem scenarios");
    if (rc.nx) s.mesh.nx = *rc.nx;
    if (rc.ny) s.mesh.ny = *rc.ny;
  }
  if (rc.steps) s.steps = *rc.steps;
  if (rc.newton_rel_tol) s.newton.rel_tol = *rc.newton_rel_tol;
  if (rc.newton_abs_floor) s.newton.abs_floor = *rc.newton_abs_floor;
  if (rc.newton_max_iter) s.newton.max_iter = *rc.newton_max_iter;
  if (rc.newton_line_search) s.newton.line_search = *rc.newton_line_search;
  s.newton.validate();
  return s;
}

// --- check -----------------------------------------------------------------

namespace detail {

struct CheckResult {
  std::string name;
  double max_err = 0.0;
  double tol = 0.0;
  bool pass() const { return max_err <= tol; }
};

inline CheckResult check_tangent(bool inject) {
  CheckResult r{"tangent_consistency", 0.0, 1e-6};
  TensorSampler sampler(20240901);
  const NeoHookeParams mats[2] = {NeoHookeParams::from_moduli(1.0, 0.78),
                                  NeoHookeParams::from_moduli(1.0, 2000.0)};
  for (int trial = 0; trial < 100; ++trial) {
    Tensor2 F = sampler.deformation_gradient(0.3, 3.0);
    for (const NeoHookeParams& p : mats) {
      Tensor4Sym C = tangent_spatial(p, F);
      if (inject) C.mandel(0, 0) *= 1.01;
      Tensor4Sym Cfd =
          tangent_fd_jaumann([&p](const Tensor2& Fp) { return cauchy_stress(p, Fp); }, F, 1e-5);
      r.max_err = std::max(r.max_err, (C - Cfd).norm() / Cfd.norm());
    }
  }
  return r;
}

inline CheckResult check_polar() {
  CheckResult r{"polar_roundtrip", 0.0, 1e-10};
  TensorSampler sampler(20240902);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor2 F = sampler.deformation_gradient(0.3, 3.0);
    PolarDecomposition pd = polar_decompose(F);
    double nf = F.norm();
    r.max_err = std::max(r.max_err, (pd.V.full() * pd.R - F).norm() / nf);
    r.max_err = std::max(r.max_err, (pd.R * pd.R.transpose() - Tensor2::identity()).norm());
    r.max_err = std::max(r.max_err, std::abs(pd.R.det() - 1.0));
    SymTensor2 Vref = sqrt_spd(SymTensor2::sym_part(F * F.transpose()));
    r.max_err = std::max(r.max_err, (pd.V - Vref).norm() / Vref.norm());
  }
  return r;
}

inline CheckResult check_spectral() {
  CheckResult r{"spectral_roundtrip", 0.0, 1e-10};
  TensorSampler sampler(20240903);
  for (int trial = 0; trial < 200; ++trial) {
    SymTensor2 A = sampler.spd();
    r.max_err = std::max(r.max_err, (exp_sym(log_spd(A)) - A).norm() / A.norm());
    SymTensor2 S = sqrt_spd(A);
    r.max_err = std::max(r.max_err,
                         (SymTensor2::sym_part(S.full() * S.full()) - A).norm() / A.norm());
  }
  return r;
}

inline CheckResult check_patch() {
  CheckResult r{"patch_consistency", 0.0, 1e-10};
  NeoHookeParams p = NeoHookeParams::from_moduli(1.0, 0.78);
  Tensor2 G;  // displacement gradient of the affine patch state
  G(0, 0) = 0.08;
  G(0, 1) = 0.03;
  G(1, 0) = -0.02;
  G(1, 1) = -0.05;

  Mesh mesh = mesh_rect(1.0, 1.0, 1, 1);
  std::vector<Dirichlet> bcs = {{"bottom", 0, 0.0, G(0, 0), G(0, 1)},
                                {"bottom", 1, 0.0, G(1, 0), G(1, 1)},
                                {"top", 0, 0.0, G(0, 0), G(0, 1)},
                                {"top", 1, 0.0, G(1, 0), G(1, 1)}};
  PlaneStrainSolver solver(mesh, bcs, {}, p, Pathway::Total);
  solver.solve_step(1.0, 1);

  Tensor2 F = Tensor2::identity() + G;
  SymTensor2 ref = cauchy_stress(p, F);
  for (int g = 0; g < 4; ++g)
    r.max_err = std::max(r.max_err, (solver.gp_stress(0, g) - ref).norm() / ref.norm());
  return r;
}

}  // namespace detail

inline int cmd_check(const CheckOptions& opt, std::ostream& out) {
  std::vector<detail::CheckResult> results;
  auto want = [&opt](const std::string& name) {
    return opt.filter.empty() || name.find(opt.filter) != std::string::npos;
  };
  if (want("tangent_consistency")) results.push_back(detail::check_tangent(opt.inject_tangent_error));
  if (want("polar_roundtrip")) results.push_back(detail::check_polar());
  if (want("spectral_roundtrip")) results.push_back(detail::check_spectral());
  if (want("patch_consistency")) results.push_back(detail::check_patch());

  if (results.empty()) {
    out << "no checks match filter '" << opt.filter << "'\n";
    return 2;
  }
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass();
    out << (r.pass() ? "[PASS] " : "[FAIL] ") << r.name << "  max_err=" << fmt_sig(r.max_err, 3)
        << "  tol=" << fmt_sig(r.tol, 3) << "\n";
  }
  out << (all ? "all checks passed\n" : "checks FAILED\n");
  return all ? 0 : 1;
}

// --- point ----------------------------------------------------------------

namespace detail {

inline std::vector<Tensor2> schedule_from_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open schedule file '" + file + "'");
  std::vector<Tensor2> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (vals.size() != 9)
      throw ConfigError("schedule file line " + std::to_string(lineno) +
                        ": expected 9 components, got " + std::to_string(vals.size()));
    Tensor2 F;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) F(i, j) = vals[std::size_t(3 * i + j)];
    out.push_back(F);
  }
  if (out.size() < 2) throw ConfigError("schedule file needs at least two states");
  return out;
}

inline std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::filesystem::path p = std::filesystem::path(dir) / name;
  std::ofstream f(p, std::ios::binary);  // binary: identical bytes on all platforms
  if (!f) throw ConfigError("cannot open output file '" + p.string() + "'");
  return f;
}

}  // namespace detail

inline int cmd_point(const RunConfig& rc, std::ostream& log) {
  std::vector<Tensor2> schedule;
  std::string label;
  if (rc.path == "dilation") {
    schedule = dilation_schedule(1.0 + rc.amount, rc.point_steps);
    label = "dilation";
  } else if (rc.path == "shear") {
    schedule = shear_schedule(rc.amount, rc.point_steps);
    label = "shear";
  } else {
    schedule = detail::schedule_from_file(rc.path);
    label = std::filesystem::path(rc.path).stem().string();
  }

  NeoHookeParams mat = NeoHookeParams::from_moduli(rc.mu, rc.kappa);
  const Pathway pathways[3] = {Pathway::Total, Pathway::RateUnmodified, Pathway::RateModified};
  std::vector<std::vector<SymTensor2>> sig;
  for (Pathway p : pathways) sig.push_back(integrate_path(mat, p, schedule));

  std::ofstream csv = detail::open_output(rc.out_dir, "point_" + label + ".csv");
  csv << "step,J";
  const char* comp[6] = {"s11", "s22", "s33", "s12", "s13", "s23"};
  for (Pathway p : pathways)
    for (const char* c : comp) csv << "," << to_string(p) << "_" << c;
  csv << "\n";
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    csv << k << "," << fmt_sig(schedule[k].det(), rc.csv_precision);
    for (int w = 0; w < 3; ++w)
      for (int c = 0; c < 6; ++c) csv << "," << fmt_sig(sig[std::size_t(w)][k][c], rc.csv_precision);
    csv << "\n";
  }
  log << "wrote " << rc.out_dir << "/point_" << label << ".csv (" << schedule.size()
      << " states)\n";
  return 0;
}

// --- run / compare ----------------------------------------------------------

inline int cmd_run(const RunConfig& rc, std::ostream& log) {
  Scenario s = resolve_scenario(rc);
  if (s.kind != ScenarioKind::Fem)
    throw ConfigError("'run' needs a fem scenario; use 'point' or 'compare' for point studies");
  Pathway pathway = pathway_from_string(rc.pathway);

  Mesh mesh = build_mesh(s);
  double disp_mag = detail::report_target_magnitude(s, mesh);
  PlaneStrainSolver solver(mesh, s.dirichlet, s.tractions, s.material, pathway, s.newton,
                           rc.threads);

  std::string base = "run_" + s.name + "_" + to_string(pathway);
  std::ofstream csv = detail::open_output(rc.out_dir, base + ".csv");
  csv << "step,scale,punch_displacement_mm,reaction_force_N,newton_iters,min_J,max_J\n";

  LoadProgram program = LoadProgram::uniform_ramp(s.steps);
  int k = 0;
  for (double scale : program.scales) {
    ++k;
    StepReport rep;
    try {
      rep = solver.solve_step(scale, k);
    } catch (const Error& e) {
      throw SolverFailure(to_string(pathway), k, e.what());
    }
    double rf = s.report_sign * rep.reactions.at(s.report_set)[std::size_t(s.report_comp)] *
                s.thickness;
    csv << k << "," << fmt_sig(scale, rc.csv_precision) << ","
        << fmt_sig(scale * disp_mag, rc.csv_precision) << "," << fmt_sig(rf, rc.csv_precision)
        << "," << rep.newton_iters << "," << fmt_sig(rep.min_J, rc.csv_precision) << ","
        << fmt_sig(rep.max_J, rc.csv_precision) << "\n";

    if (rc.vtk) {
      char name[64];
      std::snprintf(name, sizeof(name), "_step_%04d.vtk", k);
      std::ofstream vtk = detail::open_output(rc.out_dir, s.name + "_" + to_string(pathway) + name);
      write_vtk(vtk, solver.mesh(), solver.displacement(), solver.cell_J(), solver.cell_sigma(),
                s.name);
    }
  }
  log << "wrote " << rc.out_dir << "/" << base << ".csv (" << s.steps << " steps)\n";
  return 0;
}

inline int cmd_compare(const RunConfig& rc, std::ostream& log) {
  Scenario s = resolve_scenario(rc);
  ComparisonResult res = compare_pathways(s, rc.threads);

  std::ofstream csv = detail::open_output(rc.out_dir, "compare_" + s.name + ".csv");
  bool fem = s.kind == ScenarioKind::Fem;
  csv << "step," << (fem ? "displacement_mm" : "path_parameter");
  for (const PathwayCurve& c : res.curves)
    csv << "," << (fem ? "rf_" : "sigma_") << to_string(c.pathway) << (fem ? "_n" : "_mpa");
  csv << "\n";
  std::size_t npts = res.curves.front().value.size();
  for (std::size_t k = 0; k < npts; ++k) {
    csv << (fem ? k + 1 : k) << "," << fmt_sig(res.curves.front().abscissa[k], rc.csv_precision);
    for (const PathwayCurve& c : res.curves) csv << "," << fmt_sig(c.value[k], rc.csv_precision);
    csv << "\n";
  }

  std::ofstream sum = detail::open_output(rc.out_dir, "summary_" + s.name + ".txt");
  for (const std::string& line : res.summary) sum << line << "\n";

  for (const std::string& line : res.summary) log << line << "\n";
  return res.verdict_pass ? 0 : 1;
}

}  // namespace hyperbench
