#pragma once

#include <optional>
#include <vector>

#include "fleetgame/best_response.hpp"
#include "fleetgame/qp.hpp"

namespace fleetgame::detail {

/// Where each piece of one player's problem lives inside a qp::Problem.
struct PlayerLayout {
  std::size_t nodes = 0;
  Eigen::Index offset = 0;          // first variable
  std::vector<int> price_var;       // arc -> variable (relative), -1 when fixed
  ArcMatrix fixed_price;            // price of arcs without a variable
  ArcMatrix intercept;              // D * a for priced arcs, fixed rides otherwise
  ArcMatrix slope;                  // D * b for priced arcs, 0 otherwise
  Eigen::Index price_count = 0;
  Eigen::Index rebalancing0 = 0;    // relative offsets
  Eigen::Index supply0 = 0;
  Eigen::Index overflow0 = -1;
  Eigen::Index variables = 0;

  Eigen::Index supply_row0 = 0;     // G rows (relative)
  std::vector<int> lower_row, upper_row;
  Eigen::Index rebalancing_row0 = 0;
  Eigen::Index supply_nonneg_row0 = 0;
  Eigen::Index overflow_row0 = -1;
  Eigen::Index inequalities = 0;

  Eigen::Index fleet_row = 0;       // A rows (relative)
  Eigen::Index flow_row0 = 0;
  Eigen::Index equalities = 0;

  double fleet = 0.0;
  double regularization = 0.0;

  Eigen::Index r(std::size_t i, std::size_t j) const {
    return offset + rebalancing0 + static_cast<Eigen::Index>(i * nodes + j);
  }
  Eigen::Index m(std::size_t i) const { return offset + supply0 + static_cast<Eigen::Index>(i); }
  Eigen::Index p(std::size_t i, std::size_t j) const {
    const int v = price_var[i * nodes + j];
    return v < 0 ? -1 : offset + v;
  }
};

struct PlayerProblemOptions {
  double regularization = 1e-10;
  bool freeze_prices = false;
  /// Prices held fixed on every arc (the flow-only subproblem).
  const ArcMatrix* fixed_prices = nullptr;
  /// Adds supply-overflow variables with this unit penalty.
  std::optional<double> overflow_penalty;
};

struct PlayerProblem {
  qp::Problem problem;
  PlayerLayout layout;
};

/// True when every priced arc admits the affine representation with a
/// non-positive own-price slope.
bool qp_applicable(const ArcMatrix& opponent_prices, const Market& market);

PlayerProblem build_player_problem(const ArcMatrix& opponent_prices, double fleet, const Market& market,
                                   const PlayerProblemOptions& options);

/// Block-diagonal concatenation; returns the offsets of the second block.
struct StackOffsets {
  Eigen::Index variables, equalities, inequalities;
};
StackOffsets stack(qp::Problem& into, const qp::Problem& other);

/// Strategy and multipliers read back from a solved problem.
BestResponse extract(const qp::Problem& problem, const qp::Solution& solution, const PlayerLayout& layout,
                     Eigen::Index equality_offset, Eigen::Index inequality_offset,
                     const ArcMatrix& opponent_prices, const Market& market);

}  // namespace fleetgame::detail
