#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fleetgame/equilibrium.hpp"
#include "fleetgame/scenario.hpp"

namespace fleetgame {

struct ArcIndex {
  std::size_t i = 0, j = 0;
  friend bool operator==(const ArcIndex&, const ArcIndex&) = default;
};

struct PlayerMetrics {
  double fleet = 0.0;
  double profit = 0.0;
  ArcMatrix prices, rides, rebalancing;
  NodeVector supply, idle;
  double utilization = 0.0;  // sum of rides / fleet
  std::vector<ArcIndex> exit_arcs;
};

struct RunMetrics {
  std::string name;
  Mode mode = Mode::Duopoly;
  bool converged = false;
  int iterations = 0;
  ArcMatrix demand;
  PlayerMetrics a, b;
  double total_demand = 0.0;
  double total_market_served = 0.0;
  double total_rebalancing = 0.0;

  const PlayerMetrics& player(Player p) const { return p == Player::A ? a : b; }
};

RunMetrics compute_metrics(const EquilibriumResult& result, const ScenarioSpec& spec);

struct ScenarioRun {
  RunMetrics metrics;
  EquilibriumResult result;
};

/// Solves and measures one scenario. Solver errors are rethrown with the
/// scenario name in the message.
ScenarioRun run_scenario(const ScenarioSpec& spec, const BestResponseOptions& options = {});

struct MarketExit {
  Player player = Player::A;
  ArcIndex arc;
};

/// Positive-demand arcs a player prices at 1.
std::vector<MarketExit> detect_market_exit(const RunMetrics& metrics);

struct PlayerDelta {
  double profit = 0.0;
  ArcMatrix prices, rides, rebalancing;
  NodeVector supply, idle;
};

struct RunComparison {
  PlayerDelta a, b;
  double total_market_served = 0.0;
  double total_rebalancing = 0.0;
  std::vector<std::string> highlights;

  bool all_zero(double tolerance = 1e-9) const;
};

/// Per-metric differences `after - before`; throws ValidationError on a shape
/// mismatch.
RunComparison compare_runs(const RunMetrics& before, const RunMetrics& after);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxisKind { DemandMultiplier, Alpha, FleetFraction, Pattern, Parking, Penalty };
enum class SweepMode { Cross, Zip };

std::string_view to_string(SweepAxisKind kind);
SweepAxisKind parse_axis(std::string_view name);

using AxisValue = std::variant<double, DemandPattern, NodeVector, ArcMatrix>;

std::string format_axis_value(const AxisValue& value);

struct SweepAxis {
  SweepAxisKind kind = SweepAxisKind::DemandMultiplier;
  std::vector<AxisValue> values;
};

struct SweepPoint {
  std::size_t index = 0;
  std::vector<std::string> labels;  // one per axis
  ScenarioSpec spec;
  std::string error;  // set when an axis value could not be applied
};

struct SweepSpec {
  ScenarioSpec base;
  std::vector<SweepAxis> axes;
  SweepMode mode = SweepMode::Cross;

  /// Throws ValidationError for empty axes, mistyped values or zip axes of
  /// unequal length. Range checks happen per row.
  void validate() const;
  /// Parameter combinations in lexicographic axis order (first axis slowest).
  std::vector<SweepPoint> expand() const;
};

struct SweepRow {
  std::size_t index = 0;
  std::vector<std::string> labels;
  std::optional<RunMetrics> metrics;
  std::string error;

  bool ok() const noexcept { return metrics.has_value() && metrics->converged; }
};

struct SweepTable {
  std::vector<std::string> axis_names;
  std::size_t nodes = 0;
  std::vector<SweepRow> rows;

  bool all_ok() const noexcept;
};

using SweepProgress = std::function<void(const SweepRow&)>;

/// Rows run in parallel over `jobs` threads (0 = OpenMP default). Row order
/// in the table does not depend on completion order.
SweepTable run_sweep(const SweepSpec& sweep, int jobs = 0, const SweepProgress& progress = {});
SweepTable run_sweep_serial(const SweepSpec& sweep, const SweepProgress& progress = {});

/// One line per row; every line has the same number of columns.
std::vector<std::string> csv_header(const SweepTable& table);
std::string to_csv(const SweepTable& table);

}  // namespace fleetgame
