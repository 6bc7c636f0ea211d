// Command line front end: identity suites, solver recipes, refinement
// experiments and report aggregation. Exit codes: 0 all checks passed,
// 1 at least one identity/experiment failed, 2 configuration error.

#include <CLI11.hpp>

#include "hodgedirac/harness.hpp"

using hodgedirac::harness::Config;
using hodgedirac::harness::ReportRow;

namespace {

void add_common_flags(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--dim", cfg.dim, "dimension n (0 = command default sweep)");
  cmd->add_option("--grid", cfg.grid, "grid points per axis (power of two)");
  cmd->add_option("--box", cfg.box, "box side length");
  cmd->add_option("--recipe", cfg.recipe, "coefficient / experiment recipe id");
  cmd->add_option("--tol", cfg.tol, "tolerance");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--out", cfg.out, "output directory for reports/snapshots");
  cmd->add_option("--levels", cfg.levels, "refinement levels");
  cmd->add_option("--trials", cfg.trials, "randomized trials per identity");
}

int finish(const std::vector<ReportRow>& rows) {
  hodgedirac::harness::print_rows(rows);
  return hodgedirac::harness::all_pass(rows) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral Dirac-Beltrami solver and verification suites"};
  app.set_config("--config", "", "key = value configuration file; flags override");
  app.require_subcommand(1);

  Config cfg;
  std::string report_dir;

  CLI::App* verify_algebra =
      app.add_subcommand("verify-algebra", "randomized exterior/Clifford identity suite");
  add_common_flags(verify_algebra, cfg);
  CLI::App* verify_operators =
      app.add_subcommand("verify-operators", "spectral operator identity suite");
  add_common_flags(verify_operators, cfg);
  CLI::App* solve = app.add_subcommand("solve", "run a solver recipe, write report + snapshots");
  add_common_flags(solve, cfg);
  CLI::App* experiments =
      app.add_subcommand("experiments", "refinement experiments (cauchy-ball, holder, meyers, "
                                        "localization, duality, all)");
  add_common_flags(experiments, cfg);
  CLI::App* report = app.add_subcommand("report", "aggregate report files into a status matrix");
  report->add_option("path", report_dir, "directory of report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    namespace hh = hodgedirac::harness;
    if (verify_algebra->parsed()) {
      auto rows = hh::run_verify_algebra(cfg);
      if (!cfg.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        hh::write_json_report(cfg.out + "/verify-algebra.json", "verify-algebra", cfg, rows);
      }
      return finish(rows);
    }
    if (verify_operators->parsed()) {
      auto rows = hh::run_verify_operators(cfg);
      if (!cfg.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        hh::write_json_report(cfg.out + "/verify-operators.json", "verify-operators", cfg, rows);
      }
      return finish(rows);
    }
    if (solve->parsed()) return finish(hh::run_solve(cfg));
    if (experiments->parsed()) {
      if (cfg.recipe == "identity") cfg.recipe = "all";
      return finish(hh::run_experiments(cfg));
    }
    if (report->parsed()) {
      hh::ReportSummary s = hh::run_report(report_dir);
      return s.fail == 0 ? 0 : 1;
    }
  } catch (const hodgedirac::harness::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
