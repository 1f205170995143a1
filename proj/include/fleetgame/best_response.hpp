#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fleetgame/demand.hpp"
#include "fleetgame/errors.hpp"
#include "fleetgame/matrix.hpp"
#include "fleetgame/network.hpp"
#include "fleetgame/qp.hpp"

namespace fleetgame {

/// Everything a player's optimization depends on except the opponent.
struct Market {
  NetworkModel network;
  DemandSpec demand;
  DemandFunction demand_function;

  std::size_t nodes() const noexcept { return network.node_count(); }
  /// Throws ValidationError when the demand matrix does not match the network.
  void validate() const;
};

/// One player's decision plus derived quantities.
struct Strategy {
  ArcMatrix prices;
  ArcMatrix rebalancing;
  NodeVector supply;
  double fleet = 0.0;
  ArcMatrix rides;  // D f(p, p_opp)
  NodeVector idle;  // supply_i - sum_j (rides_ij + rebalancing_ij)

  std::size_t nodes() const noexcept { return prices.nodes(); }
};

/// Builds a strategy and fills rides and idle from the demand model.
Strategy make_strategy(ArcMatrix prices, ArcMatrix rebalancing, NodeVector supply, double fleet,
                       const ArcMatrix& opponent_prices, const Market& market);

/// Recomputes rides and idle in place.
void refresh_derived(Strategy& strategy, const ArcMatrix& opponent_prices, const Market& market);

/// Prices 1 on every arc, no rebalancing, fleet spread evenly over nodes.
Strategy exit_strategy(double fleet, const ArcMatrix& opponent_prices, const Market& market);

/// Revenue minus rebalancing and parking costs. Rides are recomputed from the
/// demand function; the strategy's cached rides are ignored.
double profit(const Strategy& strategy, const ArcMatrix& opponent_prices, const Market& market);

/// Worst violation of supply, flow balance, fleet and bound constraints.
double feasibility_violation(const Strategy& strategy);

struct KktDiagnostics {
  double stationarity_residual = 0.0;
  double complementarity_residual = 0.0;
  double feasibility_residual = 0.0;
  double min_multiplier = 0.0;

  NodeVector supply;          // K_i
  ArcMatrix rebalancing;      // Q_ij, multiplier of r_ij >= 0
  ArcMatrix price_lower;      // L_ij, p_ij >= 0 (per unit demand)
  ArcMatrix price_upper;      // H_ij, p_ij <= 1 (per unit demand)
  NodeVector supply_nonneg;   // multiplier of m_i >= 0
  NodeVector flow;            // flow-balance multipliers; last node's row is dropped
  double fleet = 0.0;

  /// Profit lost to the tie-break regularization term.
  double regularization_cost = 0.0;
  int iterations = 0;
  bool non_convex = false;
  /// "analytic", "finite-difference", or "closed-form" for the QP path.
  std::string gradient_source = "closed-form";
};

struct BestResponse {
  Strategy strategy;
  KktDiagnostics kkt;
  double profit = 0.0;
};

/// Thrown when the optimizer cannot meet its residual contract. Carries the
/// best iterate found.
class SolverError : public Error {
 public:
  SolverError(std::string message, BestResponse best)
      : Error(std::move(message)), best_(std::move(best)) {}
  const BestResponse& best() const noexcept { return best_; }

 private:
  BestResponse best_;
};

struct BestResponseOptions {
  double regularization = 1e-10;
  qp::Settings qp;
  /// Pin prices to 1 and optimize flows only (frozen monopoly opponent).
  bool freeze_prices = false;
  /// Generic demand only.
  int multistarts = 8;
  std::uint64_t seed = 0xb1e5;
  int max_gradient_steps = 400;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Profit-maximizing strategy against frozen opponent prices. Demand functions
/// affine in the own price yield a concave QP; anything else goes through
/// projected-gradient ascent with multi-start.
BestResponse solve_best_response(const ArcMatrix& opponent_prices, double fleet, const Market& market,
                                 const BestResponseOptions& options = {});

/// Projected-gradient path, exposed for testing against the QP path.
BestResponse solve_best_response_generic(const ArcMatrix& opponent_prices, double fleet, const Market& market,
                                         const BestResponseOptions& options = {});

/// Per-arc check of the first-order identities for an own-price-affine demand.
struct ArcKkt {
  std::size_t i = 0, j = 0;
  bool interior = false;
  double price_residual = 0.0;        // price stationarity, per unit demand
  double rebalancing_residual = 0.0;  // p_c - p_e + K_i + flow - Q
  double combined_price = 0.0;        // (a / -b + Q - v) / 2
};

struct KktReport {
  double stationarity_residual = 0.0;
  std::vector<ArcKkt> arcs;
  bool ok(double tolerance = 1e-6) const noexcept { return stationarity_residual <= tolerance; }
};

KktReport kkt_check(const Strategy& strategy, const KktDiagnostics& diagnostics, const Market& market,
                    const ArcMatrix& opponent_prices);

struct PriceFloorViolation {
  std::size_t i = 0, j = 0;
  double price = 0.0;
};

/// Arcs with positive demand priced below the floor and not exited.
std::vector<PriceFloorViolation> price_floor_check(const Strategy& strategy, const DemandSpec& demand,
                                                   double floor = 0.5, double tolerance = 1e-6);

/// Price at or above which an arc counts as exited.
inline constexpr double kExitPrice = 1.0 - 1e-6;

}  // namespace fleetgame
