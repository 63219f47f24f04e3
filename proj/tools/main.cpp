#include <CLI11.hpp>

#include <iostream>

#include "hyperbench/commands.hpp"

// Exit codes: 0 success, 1 check or verdict failure, 2 configuration error,
// 3 numerical/solver failure.

namespace {

void add_common(CLI::App* cmd, hyperbench::RunConfig& rc, std::string& config_file) {
  cmd->add_option("config", config_file, "run configuration file ([run] section, key = value)");
  cmd->add_option("--scenario", rc.scenario, "builtin scenario name or scenario file path");
  cmd->add_option("--nx", rc.nx, "mesh subdivisions in x (fem scenarios)");
  cmd->add_option("--ny", rc.ny, "mesh subdivisions in y (fem scenarios)");
  cmd->add_option("--steps", rc.steps, "number of load steps");
  cmd->add_option("--out", rc.out_dir, "output directory (default: out)");
  cmd->add_option("--csv-precision", rc.csv_precision, "significant digits in CSV output (1-17)")
      ->check(CLI::Range(1, 17));
  cmd->add_option("--threads", rc.threads, "element assembly threads (default 1, deterministic)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--newton-rel-tol", rc.newton_rel_tol, "newton relative residual tolerance");
  cmd->add_option("--newton-abs-floor", rc.newton_abs_floor, "newton absolute residual floor (N)");
  cmd->add_option("--newton-max-iter", rc.newton_max_iter, "newton iteration cap");
  cmd->add_flag("--line-search", rc.newton_line_search, "enable backtracking line search");
}

int dispatch(const std::string& name, const std::string& config_file, hyperbench::RunConfig rc,
             const CLI::App* cmd) {
  if (!config_file.empty()) {
    // File values fill in everything the command line did not set explicitly;
    // command-line flags win.
    hyperbench::RunConfig defaults;
    hyperbench::load_run_config_file(config_file, defaults);
    auto given = [&cmd](const std::string& flag) {
      const CLI::Option* o = cmd->get_option_no_throw(flag);
      return o && o->count() > 0;
    };
    if (!given("--scenario") && !defaults.scenario.empty()) rc.scenario = defaults.scenario;
    if (!given("--pathway")) rc.pathway = defaults.pathway;
    if (!given("--nx") && defaults.nx) rc.nx = defaults.nx;
    if (!given("--ny") && defaults.ny) rc.ny = defaults.ny;
    if (!given("--steps") && defaults.steps) rc.steps = defaults.steps;
    if (!given("--out")) rc.out_dir = defaults.out_dir;
    if (!given("--vtk")) rc.vtk = defaults.vtk;
    if (!given("--csv-precision")) rc.csv_precision = defaults.csv_precision;
    if (!given("--threads")) rc.threads = defaults.threads;
    if (!given("--path")) rc.path = defaults.path;
    if (!given("--amount")) rc.amount = defaults.amount;
    if (!given("--point-steps")) rc.point_steps = defaults.point_steps;
    if (!given("--mu")) rc.mu = defaults.mu;
    if (!given("--kappa")) rc.kappa = defaults.kappa;
    if (!given("--newton-rel-tol") && defaults.newton_rel_tol)
      rc.newton_rel_tol = defaults.newton_rel_tol;
    if (!given("--newton-abs-floor") && defaults.newton_abs_floor)
      rc.newton_abs_floor = defaults.newton_abs_floor;
    if (!given("--newton-max-iter") && defaults.newton_max_iter)
      rc.newton_max_iter = defaults.newton_max_iter;
    if (!given("--line-search") && defaults.newton_line_search)
      rc.newton_line_search = defaults.newton_line_search;
  }
  if (name == "point") return hyperbench::cmd_point(rc, std::cout);
  if (name == "run") return hyperbench::cmd_run(rc, std::cout);
  return hyperbench::cmd_compare(rc, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hyperbench: compressible neo-Hooke constitutive pathways (total evaluation vs.\n"
      "incremental rate integration with plain or stress-corrected tangent), point-level\n"
      "drift studies, and a plane-strain FEM workbench with pathway comparison verdicts."};
  app.require_subcommand(1);

  // check
  hyperbench::CheckOptions check_opt;
  CLI::App* check = app.add_subcommand("check", "run built-in verification checks");
  check->add_option("--filter", check_opt.filter, "run only checks whose name contains this text");
  check->add_flag("--inject-tangent-error", check_opt.inject_tangent_error,
                  "self-test hook: corrupt C_1111 by 1% and expect the tangent check to fail");

  // point
  hyperbench::RunConfig point_rc;
  std::string point_config;
  CLI::App* point = app.add_subcommand("point", "material-point pathway drift study (CSV)");
  point->add_option("config", point_config, "run configuration file");
  point->add_option("--path", point_rc.path,
                    "dilation | shear | path to an F-schedule file (9 numbers per line)");
  point->add_option("--amount", point_rc.amount,
                    "stretch increment (dilation: lambda_end - 1) or shear gamma_end");
  point->add_option("--point-steps", point_rc.point_steps, "number of increments");
  point->add_option("--mu", point_rc.mu, "shear modulus, MPa");
  point->add_option("--kappa", point_rc.kappa, "bulk modulus, MPa");
  point->add_option("--out", point_rc.out_dir, "output directory");
  point->add_option("--csv-precision", point_rc.csv_precision, "significant digits (1-17)")
      ->check(CLI::Range(1, 17));

  // run
  hyperbench::RunConfig run_rc;
  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "run one scenario with one pathway (CSV, optional VTK)");
  add_common(run, run_rc, run_config);
  run->add_option("--pathway", run_rc.pathway, "total | rate_unmodified | rate_modified");
  run->add_flag("--vtk", run_rc.vtk, "write a legacy ASCII VTK file per step");

  // compare
  hyperbench::RunConfig cmp_rc;
  std::string cmp_config;
  CLI::App* cmp = app.add_subcommand(
      "compare", "run all scenario pathways, emit curves, deviations, and the verdict");
  add_common(cmp, cmp_rc, cmp_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return hyperbench::cmd_check(check_opt, std::cout);
    if (point->parsed()) return dispatch("point", point_config, point_rc, point);
    if (run->parsed()) return dispatch("run", run_config, run_rc, run);
    return dispatch("compare", cmp_config, cmp_rc, cmp);
  } catch (const hyperbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hyperbench::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const hyperbench::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
