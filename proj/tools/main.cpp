#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fleetgame/api.hpp"
#include "fleetgame/harness.hpp"
#include "fleetgame/io.hpp"
#include "fleetgame/potential.hpp"
#include "report.hpp"

namespace {

using namespace fleetgame;

enum Exit { kOk = 0, kInputError = 1, kNumerical = 2 };

struct Options {
  std::string scenario;
  std::string out;
  std::string format = "json";
  std::optional<double> eps;
  std::optional<int> max_iters;
  std::optional<double> time_budget;
  int jobs = 0;
  std::string function;
  std::size_t resolution = 101;
  std::string host = "127.0.0.1";
  int port = 8080;
  bool quiet = false;
};

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError(fmt::format("cannot write '{}'", path), "--out");
  out << text;
}

void apply_overrides(ScenarioSpec& spec, const Options& o) {
  if (o.eps) spec.solver.eps = *o.eps;
  if (o.max_iters) spec.solver.max_iters = *o.max_iters;
  if (o.time_budget) spec.solver.time_budget_seconds = *o.time_budget;
  spec.validate();
}

int cmd_solve(const Options& o) {
  ScenarioSpec spec = io::scenario_from_json(io::load_file(o.scenario));
  apply_overrides(spec, o);
  const ScenarioRun run = run_scenario(spec);
  if (!o.out.empty()) {
    if (o.format == "csv") {
      SweepTable table{{}, spec.network.node_count(), {SweepRow{0, {}, run.metrics, {}}}};
      write_output(o.out, to_csv(table));
    } else {
      write_output(o.out, io::result_to_json(run.result, run.metrics, spec).dump(2) + "\n");
    }
  }
  if (o.out != "-" && !o.quiet) std::cout << cli::summary_table(run.metrics, run.result);
  return run.result.converged ? kOk : kNumerical;
}

int cmd_sweep(const Options& o) {
  SweepSpec sweep = io::sweep_from_json(io::load_file(o.scenario));
  apply_overrides(sweep.base, o);
  const std::size_t total = sweep.expand().size();
  std::size_t done = 0;
  const SweepTable table = run_sweep(sweep, o.jobs, [&](const SweepRow& row) {
    ++done;
    if (o.quiet) return;
    std::string status = row.ok() ? "ok" : row.error.empty() ? "not converged" : "error: " + row.error;
    std::cerr << fmt::format("[{}/{}] row {} ({}) {}\n", done, total, row.index, fmt::join(row.labels, ", "),
                             status);
  });
  const std::string text =
      o.format == "json" ? io::sweep_table_to_json(table).dump(2) + "\n" : to_csv(table);
  write_output(o.out.empty() ? "-" : o.out, text);
  return table.all_ok() ? kOk : kNumerical;
}

int cmd_check_demand(const Options& o) {
  const DemandFunction f = DemandFunction::parse(o.function);
  PropertyCheckOptions opts;
  opts.grid_resolution = o.resolution;
  const PropertyReport report = check_properties(f, opts);
  std::cout << fmt::format("demand function: {}\n", f.id()) << cli::property_table(report)
            << cli::potential_verdict(potential_admissible(f)) << "\n";
  return report.all_pass() ? kOk : kNumerical;
}

int cmd_potential_check(const Options& o) {
  const DemandFunction f = DemandFunction::parse(o.function);
  const PotentialDecision decision = potential_admissible(f);
  std::cout << fmt::format("demand function: {}\n{}\n", f.id(), cli::potential_verdict(decision));
  if (o.scenario.empty()) return decision.admissible ? kOk : kNumerical;
  if (!decision.admissible) return kNumerical;

  ScenarioSpec spec = io::scenario_from_json(io::load_file(o.scenario));
  spec.demand_function = o.function;
  apply_overrides(spec, o);
  const EquilibriumResult by_potential = solve_via_potential(spec);
  const EquilibriumResult by_response = iterate_best_response(spec);
  const double gap = std::max(max_abs_diff(by_potential.a.prices, by_response.a.prices),
                              max_abs_diff(by_potential.b.prices, by_response.b.prices));
  std::cout << fmt::format("potential maximizer: {} rounds; best response: {} iterations\n",
                           by_potential.iterations, by_response.iterations)
            << fmt::format("max price difference {:.3g}\n", gap);
  return by_potential.converged && by_response.converged ? kOk : kNumerical;
}

int cmd_serve(const Options& o) {
  api::ServiceOptions opts;
  opts.sweep_jobs = o.jobs;
  if (o.time_budget) opts.time_budget_seconds = *o.time_budget;
  api::Service service(opts);
  std::cerr << fmt::format("serving /api/v1 on http://{}:{}\n", o.host, o.port);
  api::serve(service, o.host, o.port);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium engine for two-player ride-service price competition"};
  app.require_subcommand(1);
  Options o;

  auto add_tolerances = [&](CLI::App* cmd) {
    cmd->add_option("--eps", o.eps, "Convergence tolerance on prices (default 0.01)")->envname("FLEETGAME_EPS");
    cmd->add_option("--max-iters", o.max_iters, "Iteration cap (default 100)")->envname("FLEETGAME_MAX_ITERS");
    cmd->add_option("--time-budget", o.time_budget, "Wall-clock budget per run in seconds")
        ->envname("FLEETGAME_TIME_BUDGET");
  };
  auto add_quiet = [&](CLI::App* cmd) { cmd->add_flag("-q,--quiet", o.quiet, "Suppress summary and progress"); };

  auto* solve = app.add_subcommand("solve", "Solve one scenario and print a summary");
  solve->add_option("--scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", o.out, "Write the result document here ('-' for stdout)")->envname("FLEETGAME_OUT");
  solve->add_option("--format", o.format, "Result format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("FLEETGAME_FORMAT");
  add_tolerances(solve);
  add_quiet(solve);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--scenario", o.scenario, "Sweep JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", o.out, "Output file (default stdout)")->envname("FLEETGAME_OUT");
  sweep->add_option("--format", o.format, "Table format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("FLEETGAME_FORMAT");
  sweep->add_option("--jobs", o.jobs, "Rows solved in parallel (0 = all cores)")->envname("FLEETGAME_JOBS");
  add_tolerances(sweep);
  add_quiet(sweep);

  auto* check = app.add_subcommand("check-demand", "Check a demand function against properties P1-P9");
  check->add_option("function", o.function, "Demand function id, e.g. bilinear")->required();
  check->add_option("--resolution", o.resolution, "Grid points per axis")->check(CLI::Range(2, 2001));

  auto* potential = app.add_subcommand("potential-check", "Decide whether the game admits an exact potential");
  potential->add_option("function", o.function, "Demand function id")->required();
  potential->add_option("--scenario", o.scenario, "Also solve this scenario both ways and compare")
      ->check(CLI::ExistingFile);
  add_tolerances(potential);

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--port", o.port, "TCP port")->required()->envname("FLEETGAME_PORT")->check(CLI::Range(1, 65535));
  serve->add_option("--host", o.host, "Bind address")->envname("FLEETGAME_HOST");
  serve->add_option("--jobs", o.jobs, "Threads per sweep request")->envname("FLEETGAME_JOBS");
  serve->add_option("--time-budget", o.time_budget, "Per-request solve budget in seconds (default 30)")
      ->envname("FLEETGAME_TIME_BUDGET");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }
  if (sweep->parsed() && sweep->get_option("--format")->count() == 0 && !std::getenv("FLEETGAME_FORMAT"))
    o.format = "csv";

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (check->parsed()) return cmd_check_demand(o);
    if (potential->parsed()) return cmd_potential_check(o);
    if (serve->parsed()) return cmd_serve(o);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
