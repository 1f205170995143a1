#include <random>

#include <gtest/gtest.h>

#include "fleetgame/best_response.hpp"
#include "oracles.hpp"

namespace fleetgame {
namespace {

using testing::SingleArc;
using testing::TwoArc;

TEST(BestResponse, UncongestedSelfLoopPricesAtMidpoint) {
  // With spare fleet and free parking the optimal price is (1 + p_b) / 2 for
  // any opponent price.
  for (double opp : {0.0, 0.3, 0.9}) {
    SingleArc in;
    in.demand = 100;
    in.fleet = 500;
    in.opponent_price = opp;
    const BestResponse br = solve_best_response(in.opponent(), in.fleet, in.market());
    EXPECT_NEAR(br.strategy.prices(0, 0), 0.55, 1e-6) << "opponent " << opp;
  }
}

TEST(BestResponse, ScarceFleetBindsSupply) {
  SingleArc in;
  in.demand = 200;
  in.fleet = 20;
  in.opponent_price = 0.5;
  const BestResponse br = solve_best_response(in.opponent(), in.fleet, in.market());
  EXPECT_NEAR(br.strategy.rides(0, 0), 20.0, 1e-5);
  // Rides = D (1 - p)(1 + q) / 2 = 20 gives p = 1 - 40 / (200 * 1.5).
  EXPECT_NEAR(br.strategy.prices(0, 0), 1.0 - 40.0 / 300.0, 1e-6);
  EXPECT_GT(br.kkt.supply[0], 0.0);
}

TEST(BestResponse, ProfitMatchesIndependentEvaluation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 20; ++k) {
    ArcMatrix demand(2), opponent(2);
    for (double& v : demand.values()) v = 400 * u(rng);
    for (double& v : opponent.values()) v = u(rng);
    const Market market{NetworkModel(ArcMatrix(2, 0.1), ArcMatrix{{0, 0.2 * u(rng)}, {0.2 * u(rng), 0}},
                                     NodeVector{0.3 * u(rng), 0.3 * u(rng)}),
                        DemandSpec{demand}, DemandFunction::bilinear()};
    const double fleet = 100 + 400 * u(rng);
    const BestResponse br = solve_best_response(opponent, fleet, market);
    EXPECT_NEAR(br.profit, testing::reference_profit(br.strategy, opponent, market), 1e-6 * fleet);
    EXPECT_LT(feasibility_violation(br.strategy), 1e-6);
    EXPECT_TRUE(kkt_check(br.strategy, br.kkt, market, opponent).ok());
  }
}

// Brute-force oracles over a price grid bound the solver from below.
TEST(BestResponseOracle, SingleArcNeverWorseThanGrid) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 40; ++k) {
    SingleArc in;
    in.demand = 20 + 500 * u(rng);
    in.fleet = in.demand * (0.05 + u(rng));
    in.transit = 0.3 * u(rng);
    in.penalty = 0.3 * u(rng);
    in.parking = 0.5 * u(rng);
    in.opponent_price = u(rng);
    const testing::GridOptimum grid = testing::grid_search(in, 1e-3);
    const BestResponse br = solve_best_response(in.opponent(), in.fleet, in.market());
    EXPECT_GE(br.profit, grid.profit - 1e-6 * in.fleet) << "instance " << k;
    EXPECT_LE(br.profit, grid.profit + 1e-2 * in.fleet) << "instance " << k;
  }
}

TEST(BestResponseOracle, TwoArcNeverWorseThanGrid) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 8; ++k) {
    TwoArc in;
    in.d12 = 50 + 400 * u(rng);
    in.d21 = 50 + 400 * u(rng);
    in.fleet = (in.d12 + in.d21) * (0.1 + 0.9 * u(rng));
    in.opponent_12 = u(rng);
    in.opponent_21 = u(rng);
    const testing::GridOptimum2 grid = testing::grid_search(in, 2e-3);
    const BestResponse br = solve_best_response(in.opponent(), in.fleet, in.market());
    EXPECT_GE(br.profit, grid.profit - 1e-6 * in.fleet) << "instance " << k;
    EXPECT_LE(br.profit, grid.profit + 1e-2 * in.fleet) << "instance " << k;
  }
}

TEST(BestResponse, GenericPathAgreesWithQp) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 6; ++k) {
    ArcMatrix demand(2), opponent(2);
    for (double& v : demand.values()) v = 100 + 300 * u(rng);
    for (double& v : opponent.values()) v = 0.3 + 0.7 * u(rng);
    const Market market{NetworkModel::uniform(2, 0.1), DemandSpec{demand}, DemandFunction::bilinear()};
    const double fleet = 200 + 400 * u(rng);
    const BestResponse qp = solve_best_response(opponent, fleet, market);
    const BestResponse gen = solve_best_response_generic(opponent, fleet, market);
    EXPECT_NEAR(gen.profit, qp.profit, 1e-4 * std::max(1.0, std::abs(qp.profit))) << "instance " << k;
    EXPECT_LE(gen.profit, qp.profit + 1e-6 * fleet);
    EXPECT_LT(feasibility_violation(gen.strategy), 1e-6);
  }
}

TEST(BestResponse, NonlinearDemandUsesGradientPath) {
  const Market market{NetworkModel::uniform(2, 0.1), DemandSpec{ArcMatrix{{200, 100}, {150, 50}}},
                      DemandFunction::parse("separable:g=quadratic(0.5,-0.25,-0.25),h=power(0.4,0.5)")};
  const ArcMatrix opponent(2, 0.6);
  const BestResponse br = solve_best_response(opponent, 300, market);
  EXPECT_NE(br.kkt.gradient_source, "closed-form");
  EXPECT_LT(feasibility_violation(br.strategy), 1e-6);
  // No price on the grid beats the solver on a uniform deviation.
  for (double p = 0; p <= 1.0; p += 0.05) {
    Strategy s = br.strategy;
    s.prices = ArcMatrix(2, p);
    refresh_derived(s, opponent, market);
    if (feasibility_violation(s) > 1e-9) continue;
    EXPECT_LE(profit(s, opponent, market), br.profit + 1e-6);
  }
}

TEST(BestResponse, FrozenPricesStayAtOne) {
  const Market market{NetworkModel::uniform(2, 0.1), DemandSpec{ArcMatrix{{200, 100}, {150, 50}}},
                      DemandFunction::bilinear()};
  BestResponseOptions o;
  o.freeze_prices = true;
  const BestResponse br = solve_best_response(ArcMatrix(2, 0.5), 300, market, o);
  for (double p : br.strategy.prices.values()) EXPECT_DOUBLE_EQ(p, 1.0);
  EXPECT_NEAR(br.strategy.rides.sum(), 0.0, 1e-9);
}

TEST(BestResponse, ExitStrategySpreadsFleet) {
  const Market market{NetworkModel::uniform(2, 0.1), DemandSpec{ArcMatrix(2, 100)}, DemandFunction::bilinear()};
  const Strategy s = exit_strategy(300, ArcMatrix(2, 0.5), market);
  EXPECT_EQ(s.supply, (NodeVector{150, 150}));
  EXPECT_EQ(s.prices, ArcMatrix(2, 1.0));
  EXPECT_NEAR(s.rides.sum(), 0.0, 1e-12);
  EXPECT_NEAR(profit(s, ArcMatrix(2, 0.5), market), 0.0, 1e-12);
}

TEST(BestResponse, KktIdentityOnInteriorArcs) {
  const ScenarioSpec spec = testing::load_fixture("scenario-1");
  const Market market = spec.market();
  const ArcMatrix opponent{{0.6, 0.5}, {0.7, 0.6}};
  const BestResponse br = solve_best_response(opponent, 800, market);
  const KktReport report = kkt_check(br.strategy, br.kkt, market, opponent);
  EXPECT_TRUE(report.ok());
  for (const ArcKkt& arc : report.arcs)
    if (arc.interior) EXPECT_NEAR(br.strategy.prices(arc.i, arc.j), arc.combined_price, 1e-6);
}

TEST(PriceFloor, FlagsOnlyServedArcsBelowFloor) {
  Strategy s;
  s.prices = ArcMatrix{{0.4, 1.0}, {0.3, 0.6}};
  const DemandSpec demand{ArcMatrix{{10, 10}, {0, 10}}};
  const auto v = price_floor_check(s, demand);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].i, 0u);
  EXPECT_EQ(v[0].j, 0u);
}

TEST(Market, RejectsShapeMismatch) {
  const Market market{NetworkModel::uniform(2, 0.1), DemandSpec{ArcMatrix(3, 1.0)}, DemandFunction::bilinear()};
  EXPECT_THROW(market.validate(), ValidationError);
}

}  // namespace
}  // namespace fleetgame
