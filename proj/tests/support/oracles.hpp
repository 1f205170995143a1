#pragma once

#include <filesystem>
#include <string>

#include "fleetgame/best_response.hpp"
#include "fleetgame/scenario.hpp"

namespace fleetgame::testing {

/// One node with a self-loop: demand D, fleet F. An unserved vehicle either
/// parks (p_e) or circles the self-loop (p_b + v), whichever is cheaper.
struct SingleArc {
  double demand = 100.0;
  double fleet = 80.0;
  double transit = 0.1;
  double penalty = 0.0;
  double parking = 0.0;
  double opponent_price = 0.7;
  std::string demand_function = "bilinear";

  Market market() const;
  ArcMatrix opponent() const { return ArcMatrix(1, opponent_price); }
};

struct GridOptimum {
  double price = 0.0;
  double profit = 0.0;
};

/// Exhaustive search over prices k * step, k = 0..1/step.
GridOptimum grid_search(const SingleArc& instance, double step);

/// Two nodes with demand on e12 and e21 only, no parking or penalties. The
/// cheapest feasible flows close the imbalance |x12 - x21| by rebalancing
/// and need 2 max(x12, x21) <= fleet.
struct TwoArc {
  double d12 = 300.0;
  double d21 = 100.0;
  double fleet = 250.0;
  double transit = 0.1;
  double opponent_12 = 0.6;
  double opponent_21 = 0.8;

  Market market() const;
  ArcMatrix opponent() const;
};

struct GridOptimum2 {
  double p12 = 0.0, p21 = 0.0;
  double profit = 0.0;
};

GridOptimum2 grid_search(const TwoArc& instance, double step);

/// Profit of a strategy evaluated from scratch, independent of the library:
/// sum (p - p_b) D f - sum (p_b + v) r - sum p_e idle.
double reference_profit(const Strategy& s, const ArcMatrix& opponent, const Market& market);

/// Scenario fixtures shipped in the repository.
std::filesystem::path fixture(const std::string& name);
ScenarioSpec load_fixture(const std::string& name);

}  // namespace fleetgame::testing
