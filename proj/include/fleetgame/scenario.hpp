#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "fleetgame/best_response.hpp"
#include "fleetgame/network.hpp"

namespace fleetgame {

enum class Mode { Duopoly, MonopolyA, MonopolyB };
enum class Order { AFirst, BFirst };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);
std::string_view to_string(Order order);
Order parse_order(std::string_view text);

struct SolverConfig {
  double eps = 0.01;
  int max_iters = 100;
  double init_price = 0.75;
  Order order = Order::AFirst;
  /// Extra random initializations checked for agreement; 0 disables.
  int multistart = 0;
  std::uint64_t seed = 0x5ce7a210;
  double multistart_tolerance = 1e-2;
  /// Wall-clock budget for one run; 0 means unlimited.
  double time_budget_seconds = 0.0;
};

/// One experiment: market size and skew, fleet split, network, demand model.
struct ScenarioSpec {
  std::string name = "scenario";
  double supply_total = 1000.0;       // S
  double demand_multiplier = 1.0;     // m
  double fleet_fraction = 0.5;        // beta
  DemandPattern pattern = DemandPattern::P1;
  double alpha = 0.5;
  std::optional<ArcMatrix> demand_matrix;  // pattern == Explicit
  NetworkModel network = NetworkModel::uniform(2, 0.1);
  std::string demand_function = "bilinear";
  Mode mode = Mode::Duopoly;
  SolverConfig solver;

  /// Throws ValidationError (or UnsupportedError for a pattern/network
  /// mismatch) naming the offending field.
  void validate() const;
  DemandSpec demand() const;
  Market market() const;
};

/// (beta S, (1 - beta) S)
std::pair<double, double> fleet_sizes(const ScenarioSpec& spec);

}  // namespace fleetgame
