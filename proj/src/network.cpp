#include "fleetgame/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "fleetgame/errors.hpp"

namespace fleetgame {
namespace {

void require_finite_nonnegative(std::span<const double> values, const char* field) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError(fmt::format("{} must be finite and non-negative (got {})", field, v), field);
  }
}

}  // namespace

NetworkModel::NetworkModel(ArcMatrix transit_cost_base, ArcMatrix rebalancing_penalty,
                           NodeVector parking_cost)
    : transit_cost_base_(std::move(transit_cost_base)),
      rebalancing_penalty_(std::move(rebalancing_penalty)),
      parking_cost_(std::move(parking_cost)) {
  const std::size_t n = transit_cost_base_.nodes();
  if (n == 0) throw ValidationError("network needs at least one node", "network/node_count");
  if (rebalancing_penalty_.nodes() != n)
    throw ValidationError("rebalancing_penalty must be node_count x node_count", "network/rebalancing_penalty");
  if (parking_cost_.size() != n)
    throw ValidationError("parking_cost must have node_count entries", "network/parking_cost");
  require_finite_nonnegative(transit_cost_base_.values(), "network/transit_cost");
  require_finite_nonnegative(rebalancing_penalty_.values(), "network/rebalancing_penalty");
  require_finite_nonnegative(parking_cost_, "network/parking_cost");
  for (double v : transit_cost_base_.values())
    if (v >= 1.0)
      throw ValidationError(fmt::format("transit cost must be < 1 on every arc (got {})", v),
                            "network/transit_cost");
}

NetworkModel NetworkModel::uniform(std::size_t nodes, double transit_cost, double parking_cost) {
  return NetworkModel(ArcMatrix(nodes, transit_cost), ArcMatrix(nodes, 0.0), NodeVector(nodes, parking_cost));
}

NetworkModel NetworkModel::with_parking_cost(NodeVector parking_cost) const {
  return NetworkModel(transit_cost_base_, rebalancing_penalty_, std::move(parking_cost));
}

NetworkModel NetworkModel::with_rebalancing_penalty(ArcMatrix penalty) const {
  return NetworkModel(transit_cost_base_, std::move(penalty), parking_cost_);
}

double effective_rebalancing_cost(const NetworkModel& network, std::size_t i, std::size_t j) {
  if (i >= network.node_count() || j >= network.node_count())
    throw std::out_of_range(fmt::format("arc ({}, {}) outside a {}-node network", i, j, network.node_count()));
  return network.rebalancing_cost(i, j);
}

AlphaRange alpha_range(DemandPattern pattern) {
  switch (pattern) {
    case DemandPattern::P1:
    case DemandPattern::P2:
      return {0.5, 1.0};
    case DemandPattern::P3:
      return {0.0, 1.0};
    case DemandPattern::Explicit:
      break;
  }
  throw UnsupportedError("explicit demand matrices have no alpha parameter");
}

std::string_view to_string(DemandPattern pattern) {
  switch (pattern) {
    case DemandPattern::P1: return "P1";
    case DemandPattern::P2: return "P2";
    case DemandPattern::P3: return "P3";
    case DemandPattern::Explicit: return "explicit";
  }
  return "?";
}

DemandPattern parse_pattern(std::string_view name) {
  if (name == "P1") return DemandPattern::P1;
  if (name == "P2") return DemandPattern::P2;
  if (name == "P3") return DemandPattern::P3;
  if (name == "explicit") return DemandPattern::Explicit;
  throw ValidationError(fmt::format("unknown demand pattern '{}' (expected P1, P2, P3 or explicit)", name),
                        "pattern");
}

DemandSpec build_demand_matrix(DemandPattern pattern, double alpha, double total_demand,
                               std::size_t node_count) {
  if (pattern == DemandPattern::Explicit)
    throw UnsupportedError("explicit demand matrices are supplied directly, not generated");
  if (node_count != 2)
    throw UnsupportedError(fmt::format("pattern {} is defined on 2-node networks only (got {} nodes)",
                                       to_string(pattern), node_count));
  if (!(total_demand > 0.0) || !std::isfinite(total_demand))
    throw ValidationError(fmt::format("total demand must be positive (got {})", total_demand), "demand_multiplier");
  const AlphaRange range = alpha_range(pattern);
  if (!std::isfinite(alpha) || !range.contains(alpha))
    throw ValidationError(fmt::format("alpha = {} is outside the valid range [{}, {}] for pattern {}", alpha,
                                      range.lo, range.hi, to_string(pattern)),
                          "alpha");

  const double hi = 0.5 * alpha * total_demand;
  const double lo = 0.5 * (1.0 - alpha) * total_demand;
  switch (pattern) {
    case DemandPattern::P1: return {ArcMatrix{{hi, lo}, {hi, lo}}};
    case DemandPattern::P2: return {ArcMatrix{{hi, hi}, {lo, lo}}};
    case DemandPattern::P3: return {ArcMatrix{{hi, lo}, {lo, hi}}};
    case DemandPattern::Explicit: break;
  }
  throw UnsupportedError("unreachable pattern");
}

}  // namespace fleetgame
