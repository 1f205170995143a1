#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fleetgame/best_response.hpp"
#include "fleetgame/scenario.hpp"

namespace fleetgame {

enum class Player { A, B };
enum class Method { BestResponse, Potential };

std::string_view to_string(Player player);
std::string_view to_string(Method method);

struct TraceEntry {
  int iteration = 0;
  ArcMatrix prices_a, prices_b;
  double profit_a = 0.0, profit_b = 0.0;
  double residual_a = 0.0, residual_b = 0.0;
};

struct DeviationReport {
  double gain_a = 0.0, gain_b = 0.0;
  double tolerance_a = 0.0, tolerance_b = 0.0;
  bool certified = false;
};

struct EquilibriumResult {
  Strategy a, b;
  double profit_a = 0.0, profit_b = 0.0;
  int iterations = 0;
  double residual_a = 0.0, residual_b = 0.0;
  std::vector<TraceEntry> trace;
  Method method = Method::BestResponse;
  Mode mode = Mode::Duopoly;
  bool converged = false;
  bool oscillating = false;
  bool timed_out = false;
  KktDiagnostics kkt_a, kkt_b;
  std::optional<DeviationReport> verification;
  std::vector<std::string> warnings;

  const Strategy& strategy(Player p) const { return p == Player::A ? a : b; }
  double profit(Player p) const { return p == Player::A ? profit_a : profit_b; }
};

/// Algorithm 1: alternate best responses until both price changes are at
/// most eps. `initial_b` defaults to spec.solver.init_price on every arc.
/// Non-convergence is reported through `converged`, not thrown.
EquilibriumResult iterate_best_response(const ScenarioSpec& spec,
                                        const std::optional<ArcMatrix>& initial_b = std::nullopt,
                                        const BestResponseOptions& options = {});

/// Best-response run from several seeded random starts. Runs in parallel;
/// the first entry is always the default start.
std::vector<EquilibriumResult> multistart(const ScenarioSpec& spec, int starts,
                                          const BestResponseOptions& options = {});
std::vector<EquilibriumResult> multistart_serial(const ScenarioSpec& spec, int starts,
                                                 const BestResponseOptions& options = {});

/// Initial matrices used by multistart (start 0 is the default price).
std::vector<ArcMatrix> multistart_initial_prices(const ScenarioSpec& spec, int starts);

/// Largest price distance between any start and the first.
double multistart_spread(const std::vector<EquilibriumResult>& runs);

/// The other player prices at 1 everywhere; the monopolist best-responds once.
EquilibriumResult solve_monopoly(const ScenarioSpec& spec, Player monopolist,
                                 const BestResponseOptions& options = {});

/// Dispatches on spec.mode; attaches verification and multistart evidence.
EquilibriumResult solve(const ScenarioSpec& spec, const BestResponseOptions& options = {});

/// Re-solves each best response against the stored opponent and reports the
/// profit gain. Default tolerance is 1e-4 max(1, |profit|) per player.
DeviationReport verify_equilibrium(const EquilibriumResult& result, const ScenarioSpec& spec,
                                   std::optional<double> tolerance = std::nullopt,
                                   const BestResponseOptions& options = {});

/// Period-2 cycle over the last six trace entries.
bool detect_oscillation(const std::vector<TraceEntry>& trace, double eps);

}  // namespace fleetgame
