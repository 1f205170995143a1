#include "fleetgame/scenario.hpp"

#include <cmath>

#include <fmt/format.h>

#include "fleetgame/errors.hpp"

namespace fleetgame {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Duopoly: return "duopoly";
    case Mode::MonopolyA: return "monopoly-A";
    case Mode::MonopolyB: return "monopoly-B";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "duopoly") return Mode::Duopoly;
  if (text == "monopoly-A") return Mode::MonopolyA;
  if (text == "monopoly-B") return Mode::MonopolyB;
  throw ValidationError(fmt::format("unknown mode '{}' (expected duopoly, monopoly-A or monopoly-B)", text), "mode");
}

std::string_view to_string(Order order) { return order == Order::AFirst ? "A-first" : "B-first"; }

Order parse_order(std::string_view text) {
  if (text == "A-first") return Order::AFirst;
  if (text == "B-first") return Order::BFirst;
  throw ValidationError(fmt::format("unknown order '{}' (expected A-first or B-first)", text), "solver/order");
}

void ScenarioSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(supply_total))
    throw ValidationError(fmt::format("supply_total must be positive (got {})", supply_total), "supply_total");
  if (!std::isfinite(demand_multiplier) || demand_multiplier < 0.0)
    throw ValidationError(fmt::format("demand_multiplier must be non-negative (got {})", demand_multiplier),
                          "demand_multiplier");
  if (!(fleet_fraction >= 0.0 && fleet_fraction <= 1.0))
    throw ValidationError(fmt::format("fleet_fraction must lie in [0, 1] (got {})", fleet_fraction),
                          "fleet_fraction");
  if (!positive(solver.eps)) throw ValidationError("solver eps must be positive", "solver/eps");
  if (solver.max_iters < 1) throw ValidationError("solver max_iters must be at least 1", "solver/max_iters");
  if (!(solver.init_price >= 0.0 && solver.init_price <= 1.0))
    throw ValidationError("solver init_price must lie in [0, 1]", "solver/init_price");
  if (solver.multistart < 0) throw ValidationError("solver multistart must be non-negative", "solver/multistart");

  if (pattern == DemandPattern::Explicit) {
    if (!demand_matrix) throw ValidationError("explicit pattern requires demand_matrix", "demand_matrix");
    if (demand_matrix->nodes() != network.node_count())
      throw ValidationError(fmt::format("demand_matrix is {0}x{0} but the network has {1} nodes",
                                        demand_matrix->nodes(), network.node_count()),
                            "demand_matrix");
    for (double d : demand_matrix->values())
      if (!std::isfinite(d) || d < 0.0)
        throw ValidationError("demand_matrix entries must be finite and non-negative", "demand_matrix");
  } else {
    if (network.node_count() != 2)
      throw UnsupportedError(fmt::format("pattern {} is defined for 2-node networks only (network has {} nodes)",
                                         to_string(pattern), network.node_count()));
    const AlphaRange range = alpha_range(pattern);
    if (!std::isfinite(alpha) || !range.contains(alpha))
      throw ValidationError(fmt::format("alpha = {} is outside the valid range [{}, {}] for pattern {}", alpha,
                                        range.lo, range.hi, to_string(pattern)),
                            "alpha");
  }
  DemandFunction::parse(demand_function);
}

DemandSpec ScenarioSpec::demand() const {
  if (pattern == DemandPattern::Explicit) {
    if (!demand_matrix) throw ValidationError("explicit pattern requires demand_matrix", "demand_matrix");
    return {*demand_matrix};
  }
  const double total = demand_multiplier * supply_total;
  if (total == 0.0) {
    alpha_range(pattern);
    return {ArcMatrix(network.node_count(), 0.0)};
  }
  return build_demand_matrix(pattern, alpha, total, network.node_count());
}

Market ScenarioSpec::market() const {
  Market m{network, demand(), DemandFunction::parse(demand_function)};
  m.validate();
  return m;
}

std::pair<double, double> fleet_sizes(const ScenarioSpec& spec) {
  const double a = spec.fleet_fraction * spec.supply_total;
  return {a, spec.supply_total - a};
}

}  // namespace fleetgame
