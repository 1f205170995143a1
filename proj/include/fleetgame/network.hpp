#pragma once

#include <cstddef>
#include <string_view>

#include "fleetgame/matrix.hpp"

namespace fleetgame {

/// Road network over the complete digraph (self-loops included) with its
/// cost structure. Revenue trips pay the base transit cost p_b; empty
/// rebalancing trips pay p_b + v where v is a regulatory penalty.
/// Immutable after construction.
class NetworkModel {
 public:
  NetworkModel() : NetworkModel(uniform(2, 0.0)) {}
  NetworkModel(ArcMatrix transit_cost_base, ArcMatrix rebalancing_penalty, NodeVector parking_cost);

  /// Every arc costs `transit_cost`, no penalties, `parking_cost` at every node.
  static NetworkModel uniform(std::size_t nodes, double transit_cost, double parking_cost = 0.0);

  std::size_t node_count() const noexcept { return transit_cost_base_.nodes(); }
  const ArcMatrix& transit_cost_base() const noexcept { return transit_cost_base_; }
  const ArcMatrix& rebalancing_penalty() const noexcept { return rebalancing_penalty_; }
  const NodeVector& parking_cost() const noexcept { return parking_cost_; }

  double trip_cost(std::size_t i, std::size_t j) const { return transit_cost_base_(i, j); }
  double rebalancing_cost(std::size_t i, std::size_t j) const {
    return transit_cost_base_(i, j) + rebalancing_penalty_(i, j);
  }
  double parking(std::size_t i) const { return parking_cost_[i]; }

  NetworkModel with_parking_cost(NodeVector parking_cost) const;
  NetworkModel with_rebalancing_penalty(ArcMatrix penalty) const;

 private:
  ArcMatrix transit_cost_base_;
  ArcMatrix rebalancing_penalty_;
  NodeVector parking_cost_;
};

/// p_c^{ij} = p_b^{ij} + v^{ij}; throws std::out_of_range on a bad arc.
double effective_rebalancing_cost(const NetworkModel& network, std::size_t i, std::size_t j);

/// Arc-indexed demand rates D^{ij}.
struct DemandSpec {
  ArcMatrix matrix;
  double total() const noexcept { return matrix.sum(); }
};

enum class DemandPattern { P1, P2, P3, Explicit };

struct AlphaRange {
  double lo;
  double hi;
  bool contains(double alpha) const noexcept { return alpha >= lo && alpha <= hi; }
};

/// Valid alpha interval for a two-node pattern.
AlphaRange alpha_range(DemandPattern pattern);

std::string_view to_string(DemandPattern pattern);
DemandPattern parse_pattern(std::string_view name);

/// Two-node demand matrix of pattern P1/P2/P3 whose entries sum to
/// `total_demand`.
DemandSpec build_demand_matrix(DemandPattern pattern, double alpha, double total_demand,
                               std::size_t node_count = 2);

}  // namespace fleetgame
