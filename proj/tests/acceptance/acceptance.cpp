// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance        run all criteria, exit 0 iff all pass
//   acceptance N...   run the listed criteria only

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "fleetgame/demand.hpp"
#include "fleetgame/equilibrium.hpp"
#include "fleetgame/harness.hpp"
#include "fleetgame/potential.hpp"
#include "oracles.hpp"

namespace {

using namespace fleetgame;
using testing::load_fixture;

// Tolerances.
constexpr double kVehicles = 5.0;
constexpr double kPrice = 0.01;
constexpr double kRidesUnchanged = 2.0;
constexpr double kRebalancingTotal = 15.0;
constexpr double kProfitA = 5.0;
constexpr double kProfitB = 8.0;
constexpr double kTableVRides = 8.0;
constexpr double kPriceFloor = 0.5;
constexpr double kPriceFloorSlack = 1e-6;
constexpr double kPotentialRelative = 1e-9;
constexpr double kCrossMethodPrice = 1e-3;
constexpr double kDeviationGain = 1e-4;
constexpr double kConvergenceEps = 0.01;
constexpr int kConvergenceIterations = 10;
constexpr double kMultistartSpread = 1e-2;
constexpr double kSymmetry = 0.01;
constexpr double kFlatProfit = 0.01;
constexpr double kMarketServed = 0.01;
constexpr double kOracleSlack = 1e-3;  // times the fleet
constexpr double kOracleStep = 1e-3;
constexpr double kStationarity = 1e-6;

/// Collects mismatches for one criterion.
class Check {
 public:
  void near(const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) fail(fmt::format("{} = {:.4g}, expected {} +/- {}", what, got, want, tol));
  }
  void that(bool ok, const std::string& message) {
    if (!ok) fail(message);
  }
  void fail(std::string message) { failures_.push_back(std::move(message)); }
  void note(std::string message) { notes_.push_back(std::move(message)); }

  bool passed() const { return failures_.empty(); }
  std::string detail() const {
    std::vector<std::string> parts = failures_;
    parts.insert(parts.end(), notes_.begin(), notes_.end());
    if (parts.size() > 8) {
      const std::size_t hidden = parts.size() - 8;
      parts.resize(8);
      parts.push_back(fmt::format("... {} more", hidden));
    }
    return fmt::format("{}", fmt::join(parts, "; "));
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string arc(std::size_t i, std::size_t j) { return fmt::format("e{}{}", i + 1, j + 1); }

const std::vector<std::string>& golden_names() {
  static const std::vector<std::string> names = {"scenario-1", "scenario-2", "scenario-3", "table-iv", "table-v"};
  return names;
}

ScenarioRun run(const std::string& fixture) { return run_scenario(load_fixture(fixture)); }

// 1-3 --------------------------------------------------------------------

void criterion_1(Check& c) {
  const PlayerMetrics b = run("scenario-1").metrics.b;
  c.near("B supply node 1", b.supply[0], 495, kVehicles);
  c.near("B supply node 2", b.supply[1], 305, kVehicles);
  const double prices[2][2] = {{0.71, 0.5}, {0.73, 0.55}};
  const double rides[2][2] = {{200, 111}, {200, 105}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      c.near("B price " + arc(i, j), b.prices(i, j), prices[i][j], kPrice);
      c.near("B rides " + arc(i, j), b.rides(i, j), rides[i][j], kVehicles);
    }
  c.near("B rebalancing e12", b.rebalancing(0, 1), 89, kVehicles);
  c.near("B idle node 1", b.idle[0], 95, kVehicles);
}

void criterion_2(Check& c) {
  const PlayerMetrics s1 = run("scenario-1").metrics.b;
  const PlayerMetrics s2 = run("scenario-2").metrics.b;
  c.that(max_abs_diff(s1.prices, s2.prices) <= kPrice,
         fmt::format("B prices moved by {:.4g} from Scenario 1", max_abs_diff(s1.prices, s2.prices)));
  c.that(max_abs_diff(s1.rides, s2.rides) <= kRidesUnchanged,
         fmt::format("B rides moved by {:.4g} from Scenario 1", max_abs_diff(s1.rides, s2.rides)));
  c.near("B supply node 1", s2.supply[0], 400, kVehicles);
  c.near("B supply node 2", s2.supply[1], 400, kVehicles);
  c.near("B idle node 1", s2.idle[0], 0, kVehicles);
  c.near("B idle node 2", s2.idle[1], 95, kVehicles);
}

void criterion_3(Check& c) {
  const PlayerMetrics s2 = run("scenario-2").metrics.b;
  const PlayerMetrics s3 = run("scenario-3").metrics.b;
  c.near("B rides e22", s3.rides(1, 1), 116, kVehicles);
  c.that(s3.rebalancing.sum() > s2.rebalancing.sum(),
         fmt::format("B total rebalancing {:.1f} does not exceed Scenario 2's {:.1f}", s3.rebalancing.sum(),
                     s2.rebalancing.sum()));
  c.near("B total rebalancing", s3.rebalancing.sum(), 173, kRebalancingTotal);
  for (std::size_t i = 0; i < s3.idle.size(); ++i) c.near(fmt::format("B idle node {}", i + 1), s3.idle[i], 0, 0.5);
}

// 4-5 --------------------------------------------------------------------

void criterion_4(Check& c) {
  const RunMetrics m = run("table-iv").metrics;
  c.near("profit A", m.a.profit, 134, kProfitA);
  c.near("profit B", m.b.profit, 254, kProfitB);
  c.near("A price e11", m.a.prices(0, 0), 0.77, kPrice);
  c.near("A price e12", m.a.prices(0, 1), 1.00, kPrice);
  c.near("B price e11", m.b.prices(0, 0), 0.77, kPrice);
  c.near("B price e12", m.b.prices(0, 1), 0.80, kPrice);
  c.near("A rides e11", m.a.rides(0, 0), 200, kVehicles);
  c.near("A rides e12", m.a.rides(0, 1), 0, kVehicles);
  c.near("B rides e11", m.b.rides(0, 0), 200, kVehicles);
  c.near("B rides e12", m.b.rides(0, 1), 200, kVehicles);
}

void criterion_5(Check& c) {
  // Grid over node-1 parking cost and the e21 rebalancing penalty.
  const ScenarioSpec base = load_fixture("table-iv");
  double best_error = std::numeric_limits<double>::infinity();
  std::string best;
  bool found = false;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b) {
      const double parking = 0.05 * a, penalty = 0.05 * b;
      ScenarioSpec spec = base;
      ArcMatrix v(2, 0.0);
      v(1, 0) = penalty;
      spec.network = NetworkModel(base.network.transit_cost_base(), v, NodeVector{parking, 0.0});
      const RunMetrics m = run_scenario(spec).metrics;
      const double error = std::max({std::abs(m.b.profit - 157) / kProfitB, std::abs(m.b.rides(0, 1) - 150) / kTableVRides,
                                     std::abs(m.b.prices(0, 1) - 0.85) / kPrice, std::abs(m.a.profit - 134) / kProfitA});
      if (error <= 1.0) found = true;
      if (error < best_error) {
        best_error = error;
        best = fmt::format("closest p_e1 = {:.2f}, v21 = {:.2f}: B profit {:.1f}, B rides e12 {:.1f}, B price e12 {:.4f}, "
                           "A profit {:.1f}",
                           parking, penalty, m.b.profit, m.b.rides(0, 1), m.b.prices(0, 1), m.a.profit);
      }
    }
  c.that(found, "no (p_e1, v21) in [0, 1]^2 (step 0.05) reproduces B profit 157, B rides e12 150, B price e12 0.85 "
                "and A profit 134 together");
  c.note(best);

  const RunMetrics fixture = run("table-v").metrics;
  c.note(fmt::format("fixture table-v: B profit {:.1f}, B rides e12 {:.1f}, B price e12 {:.4f}", fixture.b.profit,
                     fixture.b.rides(0, 1), fixture.b.prices(0, 1)));
}

// 6-8 --------------------------------------------------------------------

void criterion_6(Check& c) {
  const PropertyReport report = check_properties(DemandFunction::bilinear(), 101);
  c.that(report.grid_resolution == 101, "grid is not 101x101");
  for (const PropertyResult& r : report.results)
    c.that(r.pass && r.violations == 0,
           fmt::format("P{} has {} violation(s)", static_cast<int>(r.property), r.violations));
}

ScenarioSpec random_scenario(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScenarioSpec s;
  const DemandPattern patterns[] = {DemandPattern::P1, DemandPattern::P2, DemandPattern::P3};
  s.pattern = patterns[rng() % 3];
  const AlphaRange r = alpha_range(s.pattern);
  s.alpha = r.lo + (r.hi - r.lo) * u(rng);
  s.fleet_fraction = 0.2 + 0.3 * u(rng);
  s.demand_multiplier = 0.5 + 1.5 * u(rng);
  s.network = NetworkModel(ArcMatrix(2, 0.05 + 0.15 * u(rng)), ArcMatrix(2, 0.0),
                           NodeVector{0.5 * u(rng), 0.5 * u(rng)});
  return s;
}

void criterion_7(Check& c) {
  std::vector<ScenarioSpec> specs;
  for (const auto& name : golden_names()) specs.push_back(load_fixture(name));
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    specs.push_back(random_scenario(rng));
    specs.back().name = fmt::format("random-{}", k);
  }
  std::size_t arcs = 0;
  for (const ScenarioSpec& spec : specs) {
    const EquilibriumResult r = solve(spec);
    const DemandSpec demand = spec.demand();
    for (Player p : {Player::A, Player::B}) {
      for (const auto& v : price_floor_check(r.strategy(p), demand, kPriceFloor, kPriceFloorSlack))
        c.fail(fmt::format("{} player {} price {:.6f} on {}", spec.name, to_string(p), v.price, arc(v.i, v.j)));
      for (double d : demand.matrix.values()) arcs += d > 0.0;
    }
  }
  c.note(fmt::format("{} scenarios, {} player-arcs checked", specs.size(), arcs));
}

Strategy random_strategy(std::mt19937_64& rng, std::size_t n, double fleet) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Strategy s;
  s.fleet = fleet;
  s.prices = ArcMatrix(n);
  s.rebalancing = ArcMatrix(n);
  for (double& v : s.prices.values()) v = u(rng);
  for (double& v : s.rebalancing.values()) v = 50.0 * u(rng);
  s.supply = NodeVector(n);
  for (double& v : s.supply) v = fleet * u(rng);
  return s;
}

void criterion_8(Check& c) {
  const PotentialDecision bilinear = potential_admissible(DemandFunction::bilinear());
  c.that(!bilinear.admissible, "bilinear reported admissible");
  c.that(bilinear.witness.has_value() && std::abs(bilinear.witness->gap) > 0.0, "bilinear verdict has no witness");

  const std::pair<const char*, double> linear[] = {
      {"separable-linear:g=affine(1,-1),C=0.25", 0.25},     {"separable-linear:g=affine(0.5,-0.5),C=0.5", 0.5},
      {"separable-linear:g=affine(0.6,-0.8),C=0.1", 0.1},   {"separable-linear:g=affine(0.4,-0.3),C=0.3", 0.3},
      {"separable:g=affine(0.7,-0.9),h=affine(0,0.45)", 0.45}};
  const char* nonlinear[] = {"separable:g=affine(0.5,-0.5),h=power(0.5,2)",
                             "separable:g=affine(0.5,-0.5),h=quadratic(0,0.2,0.3)",
                             "separable:g=quadratic(0.5,-0.25,-0.25),h=power(0.4,0.5)"};
  for (const char* id : nonlinear)
    c.that(!potential_admissible(DemandFunction::parse(id)).admissible, fmt::format("{} reported admissible", id));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (const auto& [id, slope] : linear) {
    const DemandFunction f = DemandFunction::parse(id);
    const PotentialDecision d = potential_admissible(f);
    if (!d.admissible || !d.slope || std::abs(*d.slope - slope) > 1e-12) {
      c.fail(fmt::format("{}: expected admissible with C = {}", id, slope));
      continue;
    }
    const std::size_t n = 2;
    ArcMatrix demand(n), transit(n), penalty(n);
    for (double& v : demand.values()) v = 500.0 * u(rng);
    for (double& v : transit.values()) v = 0.2 * u(rng);
    for (double& v : penalty.values()) v = 0.3 * u(rng);
    const Market market{NetworkModel(transit, penalty, NodeVector{0.3 * u(rng), 0.3 * u(rng)}), DemandSpec{demand}, f};
    const PotentialFunction phi = PotentialFunction::build(market);
    for (int k = 0; k < 100; ++k) {
      const Strategy a = random_strategy(rng, n, 400.0), b = random_strategy(rng, n, 600.0);
      const bool move_a = k % 2 == 0;
      const Strategy moved = random_strategy(rng, n, move_a ? 400.0 : 600.0);
      const double du = move_a ? profit(moved, b.prices, market) - profit(a, b.prices, market)
                               : profit(moved, a.prices, market) - profit(b, a.prices, market);
      const double dphi = move_a ? phi(moved, b) - phi(a, b) : phi(a, moved) - phi(a, b);
      const double rel = std::abs(dphi - du) / std::max(1.0, std::abs(du));
      worst = std::max(worst, rel);
      if (rel > kPotentialRelative)
        c.fail(fmt::format("{}: deviation {} has dPhi {:.12g} vs dU {:.12g}", id, k, dphi, du));
    }
  }
  c.note(fmt::format("worst relative |dPhi - dU| {:.2e} over 500 deviations", worst));
}

// 9-13 -------------------------------------------------------------------

void criterion_9(Check& c) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_price = 0.0;
  for (int k = 0; k < 5; ++k) {
    ScenarioSpec s = random_scenario(rng);
    s.name = fmt::format("separable-{}", k);
    s.fleet_fraction = 0.3 + 0.2 * u(rng);
    const double slope = 0.1 + 0.2 * u(rng);
    // Rides at the exit price, D C p_other, must fit the smaller fleet.
    s.demand_multiplier = std::min(2.0, 0.5 * std::min(s.fleet_fraction, 1.0 - s.fleet_fraction) / slope);
    s.demand_function = fmt::format("separable-linear:g=affine(1,-1),C={:.6f}", slope);
    s.solver.eps = 1e-6;

    const EquilibriumResult by_potential = solve_via_potential(s);
    const EquilibriumResult by_response = iterate_best_response(s);
    const DemandSpec demand = s.demand();
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        if (demand.matrix(i, j) <= 0.0) continue;
        const double gap = std::max(std::abs(by_potential.a.prices(i, j) - by_response.a.prices(i, j)),
                                    std::abs(by_potential.b.prices(i, j) - by_response.b.prices(i, j)));
        worst_price = std::max(worst_price, gap);
        if (gap > kCrossMethodPrice) c.fail(fmt::format("{} {}: methods differ by {:.3g}", s.name, arc(i, j), gap));
      }
    for (const EquilibriumResult* r : {&by_potential, &by_response}) {
      const DeviationReport rep = verify_equilibrium(*r, s);
      const bool ok = rep.certified && rep.gain_a <= kDeviationGain * std::abs(r->profit_a) &&
                      rep.gain_b <= kDeviationGain * std::abs(r->profit_b);
      c.that(ok, fmt::format("{} ({}): deviation gains {:.3g} / {:.3g}", s.name, to_string(r->method), rep.gain_a,
                             rep.gain_b));
    }
  }
  c.note(fmt::format("largest price difference {:.2e}", worst_price));
}

void criterion_10(Check& c) {
  int slowest = 0;
  double widest = 0.0;
  for (const auto& name : golden_names()) {
    ScenarioSpec spec = load_fixture(name);
    spec.solver.eps = kConvergenceEps;
    const EquilibriumResult r = iterate_best_response(spec);
    slowest = std::max(slowest, r.iterations);
    c.that(r.converged && r.iterations <= kConvergenceIterations,
           fmt::format("{}: {} after {} iterations", name, r.converged ? "converged" : "not converged", r.iterations));
    const double spread = multistart_spread(multistart(spec, 4));
    widest = std::max(widest, spread);
    c.that(spread <= kMultistartSpread, fmt::format("{}: multi-start spread {:.3g}", name, spread));
  }
  c.note(fmt::format("max {} iterations, max multi-start spread {:.2e}", slowest, widest));
}

void criterion_11(Check& c) {
  double worst = 0.0;
  int count = 0;
  for (DemandPattern p : {DemandPattern::P1, DemandPattern::P2, DemandPattern::P3})
    for (double alpha : {0.5, 0.75, 1.0})
      for (double m : {0.5, 1.0, 2.0}) {
        ScenarioSpec s;
        s.pattern = p;
        s.alpha = alpha;
        s.demand_multiplier = m;
        s.fleet_fraction = 0.5;
        s.name = fmt::format("{} alpha={} m={}", to_string(p), alpha, m);
        const EquilibriumResult r = solve(s);
        const double gap = max_abs_diff(r.a.prices, r.b.prices);
        worst = std::max(worst, gap);
        ++count;
        c.that(gap <= kSymmetry, fmt::format("{}: |p_A - p_B| = {:.4g}", s.name, gap));
      }
  c.note(fmt::format("{} balanced specs, max |p_A - p_B| {:.2e}", count, worst));
}

SweepTable sweep(ScenarioSpec base, std::vector<SweepAxis> axes) {
  SweepSpec s;
  s.base = std::move(base);
  s.axes = std::move(axes);
  return run_sweep(s);
}

void criterion_12(Check& c) {
  ScenarioSpec base;
  base.fleet_fraction = 0.5;
  base.demand_multiplier = 2.0;

  auto rows_ok = [&](const SweepTable& t, const char* label) {
    for (const SweepRow& r : t.rows)
      if (!r.ok()) {
        c.fail(fmt::format("{} row {} failed: {}", label, r.index, r.error));
        return false;
      }
    return true;
  };

  {
    ScenarioSpec s = base;
    s.pattern = DemandPattern::P2;
    s.alpha = 0.75;
    const SweepTable t = sweep(s, {{SweepAxisKind::DemandMultiplier, {0.5, 1.0, 2.0}}});
    if (rows_ok(t, "m sweep"))
      for (std::size_t k = 1; k < t.rows.size(); ++k)
        for (Player p : {Player::A, Player::B}) {
          const double before = t.rows[k - 1].metrics->player(p).profit, after = t.rows[k].metrics->player(p).profit;
          c.that(after > before, fmt::format("P2 profit {} does not increase from m = {} to {}: {:.2f} -> {:.2f}",
                                             to_string(p), t.rows[k - 1].labels[0], t.rows[k].labels[0], before, after));
        }
  }
  for (DemandPattern pattern : {DemandPattern::P1, DemandPattern::P2, DemandPattern::P3}) {
    ScenarioSpec s = base;
    s.pattern = pattern;
    const SweepTable t = sweep(s, {{SweepAxisKind::Alpha, {0.5, 0.75, 1.0}}});
    if (!rows_ok(t, "alpha sweep")) continue;
    for (Player p : {Player::A, Player::B}) {
      std::vector<double> profits;
      for (const SweepRow& r : t.rows) profits.push_back(r.metrics->player(p).profit);
      const auto [lo, hi] = std::minmax_element(profits.begin(), profits.end());
      if (pattern == DemandPattern::P3) {
        c.that(*hi - *lo <= kFlatProfit * std::abs(*hi),
               fmt::format("P3 profit {} varies over alpha: {:.2f}", to_string(p), fmt::join(profits, ", ")));
      } else {
        for (std::size_t k = 1; k < profits.size(); ++k)
          c.that(profits[k] <= profits[k - 1] * (1.0 + 1e-6),
                 fmt::format("{} profit {} increases with alpha: {:.2f}", to_string(pattern), to_string(p), fmt::join(profits, ", ")));
      }
    }
  }
  {
    ScenarioSpec s = base;
    s.pattern = DemandPattern::P1;
    s.alpha = 1.0;
    const SweepTable t = sweep(s, {{SweepAxisKind::FleetFraction, {0.2, 0.3, 0.4, 0.5}}});
    if (rows_ok(t, "beta sweep")) {
      std::vector<double> served;
      for (const SweepRow& r : t.rows) served.push_back(r.metrics->total_market_served);
      const auto [lo, hi] = std::minmax_element(served.begin(), served.end());
      c.that(*hi - *lo <= kMarketServed * *hi, fmt::format("total market served varies over beta: {:.1f}", fmt::join(served, ", ")));
    }
  }
  {
    ScenarioSpec s = base;
    s.pattern = DemandPattern::P1;
    s.alpha = 1.0;
    s.fleet_fraction = 0.2;
    const auto exits = detect_market_exit(run_scenario(s).metrics);
    const bool a_exits_e21 = std::any_of(exits.begin(), exits.end(), [](const MarketExit& e) {
      return e.player == Player::A && e.arc == ArcIndex{1, 0};
    });
    c.that(a_exits_e21, "player A does not exit e21 at (P1, alpha = 1, beta = 0.2, m = 2)");
  }
}

void criterion_13(Check& c) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 24; ++k) {
    testing::SingleArc in;
    in.demand = 50.0 + 450.0 * u(rng);
    in.fleet = in.demand * (0.1 + 0.9 * u(rng));
    in.transit = 0.2 * u(rng);
    in.penalty = 0.2 * u(rng);
    in.parking = k % 3 == 0 ? 0.0 : 0.4 * u(rng);
    in.opponent_price = u(rng);
    const testing::GridOptimum oracle = testing::grid_search(in, kOracleStep);
    const BestResponse br = solve_best_response(in.opponent(), in.fleet, in.market());
    const double shortfall = oracle.profit - br.profit;
    worst = std::max(worst, shortfall / in.fleet);
    c.that(shortfall <= kOracleSlack * in.fleet,
           fmt::format("single-arc instance {}: solver {:.6f} vs grid {:.6f}", k, br.profit, oracle.profit));
  }
  c.note(fmt::format("worst (grid - solver) / fleet {:.2e}", worst));

  double worst_kkt = 0.0;
  for (const auto& name : golden_names()) {
    const ScenarioSpec spec = load_fixture(name);
    const Market market = spec.market();
    const EquilibriumResult r = solve(spec);
    for (Player p : {Player::A, Player::B}) {
      const ArcMatrix& opponent = r.strategy(p == Player::A ? Player::B : Player::A).prices;
      const BestResponse br = solve_best_response(opponent, r.strategy(p).fleet, market);
      const KktReport report = kkt_check(br.strategy, br.kkt, market, opponent);
      const double residual = std::max(br.kkt.stationarity_residual, report.stationarity_residual);
      worst_kkt = std::max(worst_kkt, residual);
      c.that(residual <= kStationarity,
             fmt::format("{} player {}: stationarity residual {:.2e}", name, to_string(p), residual));
    }
  }
  c.note(fmt::format("worst stationarity residual {:.2e}", worst_kkt));
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Check&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "Scenario 1 golden numbers (player B)", criterion_1},
      {2, "Scenario 2: parking cost at node 1 relocates idle vehicles", criterion_2},
      {3, "Scenario 3: parking cost at both nodes", criterion_3},
      {4, "table-iv golden numbers", criterion_4},
      {5, "table-v: some (p_e1, v21) reproduces the regulated outcome", criterion_5},
      {6, "bilinear demand satisfies P1-P9 on a 101x101 grid", criterion_6},
      {7, "equilibrium prices on served arcs are at least 0.5", criterion_7},
      {8, "potential admissibility and exactness of the potential", criterion_8},
      {9, "potential maximizer agrees with best-response iteration", criterion_9},
      {10, "best-response iteration converges fast from any start", criterion_10},
      {11, "balanced duopolies price symmetrically", criterion_11},
      {12, "trends in m, alpha and beta; market exit", criterion_12},
      {13, "brute-force oracle and KKT stationarity", criterion_13},
  };
  return list;
}

bool run_one(const Criterion& cr) {
  Check check;
  try {
    cr.run(check);
  } catch (const std::exception& e) {
    check.fail(fmt::format("exception: {}", e.what()));
  }
  const std::string detail = check.detail();
  std::printf("%s criterion %2d: %s%s%s\n", check.passed() ? "PASS" : "FAIL", cr.id, cr.title,
              detail.empty() ? "" : " | ", detail.c_str());
  std::fflush(stdout);
  return check.passed();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.push_back(std::atoi(argv[k]));
  bool all = true;
  for (const Criterion& cr : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), cr.id) == wanted.end()) continue;
    all = run_one(cr) && all;
  }
  return all ? 0 : 1;
}
