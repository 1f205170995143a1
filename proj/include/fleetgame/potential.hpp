#pragma once

#include <optional>
#include <string>

#include "fleetgame/best_response.hpp"
#include "fleetgame/demand.hpp"
#include "fleetgame/equilibrium.hpp"
#include "fleetgame/scenario.hpp"

namespace fleetgame {

struct CrossPartialWitness {
  double p_a = 0.0;
  double p_b = 0.0;
  double gap = 0.0;  // per unit demand
};

struct PotentialDecision {
  bool admissible = false;
  std::optional<double> slope;                 // C when admissible
  std::optional<CrossPartialWitness> witness;  // when inadmissible and one was found
  std::string reason;
};

/// d2U_A/dp_A dp_B - d2U_B/dp_A dp_B on one arc, per unit demand and with
/// zero transit and parking cost (they cancel in the difference). An exact
/// potential requires this to vanish everywhere.
double cross_partial_gap(const DemandFunction& f, double p_a, double p_b);

/// Separable f: admissible iff h(p) = C p with C > 0. Otherwise the
/// cross-partial symmetry test runs on a 5x5 price grid.
PotentialDecision potential_admissible(const DemandFunction& f);

/// Exact potential of the game for f = g(p_own) + C p_other:
///   sum D [p_A g(p_A) + p_B g(p_B) + (p_e - p_b)(g(p_A) + g(p_B))] + C sum D p_A p_B
///   - sum p_e (m_A + m_B) + sum (p_e - p_b - v)(r_A + r_B)
class PotentialFunction {
 public:
  /// Throws UnsupportedError when the demand function is not admissible.
  static PotentialFunction build(const Market& market);

  double operator()(const Strategy& a, const Strategy& b) const;
  double slope() const noexcept { return slope_; }

 private:
  PotentialFunction(Market market, double slope) : market_(std::move(market)), slope_(slope) {}
  Market market_;
  double slope_;
};

struct PotentialOptions {
  double tolerance = 1e-10;  // fixed-point change in prices
  int max_rounds = 500;
  BestResponseOptions best_response;
};

/// Maximizes the potential jointly over both players' strategies. The
/// opponent price appearing inside each player's supply and flow constraints
/// is held at the previous round's value and iterated to a fixed point, which
/// satisfies both players' best-response optimality conditions. Requires an
/// affine g with 2|g'| >= C.
EquilibriumResult solve_via_potential(const ScenarioSpec& spec, const PotentialOptions& options = {});

}  // namespace fleetgame
