#include "fleetgame/best_response.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "player_qp.hpp"

namespace fleetgame {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void Market::validate() const {
  const std::size_t n = network.node_count();
  if (demand.matrix.nodes() != n)
    throw ValidationError(fmt::format("demand matrix is {0}x{0} but the network has {1} nodes",
                                      demand.matrix.nodes(), n),
                          "demand_matrix");
  for (double d : demand.matrix.values())
    if (!std::isfinite(d) || d < 0.0)
      throw ValidationError(fmt::format("demand rates must be finite and non-negative (got {})", d),
                            "demand_matrix");
}

namespace {

void require_shape(const ArcMatrix& m, std::size_t n, const char* what) {
  if (m.nodes() != n)
    throw ValidationError(fmt::format("{} is {}x{}, expected {}x{}", what, m.nodes(), m.nodes(), n, n), what);
}

}  // namespace

void refresh_derived(Strategy& s, const ArcMatrix& opponent_prices, const Market& market) {
  const std::size_t n = market.nodes();
  require_shape(s.prices, n, "prices");
  require_shape(s.rebalancing, n, "rebalancing");
  require_shape(opponent_prices, n, "opponent_prices");
  if (s.supply.size() != n) throw ValidationError("supply must have node_count entries", "supply");
  s.rides = ArcMatrix(n);
  s.idle.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double used = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = market.demand.matrix(i, j);
      s.rides(i, j) = d > 0.0 ? d * market.demand_function.eval(s.prices(i, j), opponent_prices(i, j)) : 0.0;
      used += s.rides(i, j) + s.rebalancing(i, j);
    }
    s.idle[i] = s.supply[i] - used;
  }
}

Strategy make_strategy(ArcMatrix prices, ArcMatrix rebalancing, NodeVector supply, double fleet,
                       const ArcMatrix& opponent_prices, const Market& market) {
  Strategy s{std::move(prices), std::move(rebalancing), std::move(supply), fleet, {}, {}};
  refresh_derived(s, opponent_prices, market);
  return s;
}

Strategy exit_strategy(double fleet, const ArcMatrix& opponent_prices, const Market& market) {
  const std::size_t n = market.nodes();
  return make_strategy(ArcMatrix(n, 1.0), ArcMatrix(n, 0.0), NodeVector(n, fleet / static_cast<double>(n)), fleet,
                       opponent_prices, market);
}

double profit(const Strategy& s, const ArcMatrix& opponent_prices, const Market& market) {
  const std::size_t n = market.nodes();
  require_shape(s.prices, n, "prices");
  require_shape(s.rebalancing, n, "rebalancing");
  require_shape(opponent_prices, n, "opponent_prices");
  if (s.supply.size() != n) throw ValidationError("supply must have node_count entries", "supply");
  const NetworkModel& net = market.network;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double used = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = market.demand.matrix(i, j);
      const double x = d > 0.0 ? d * market.demand_function.eval(s.prices(i, j), opponent_prices(i, j)) : 0.0;
      total += (s.prices(i, j) - net.trip_cost(i, j)) * x - net.rebalancing_cost(i, j) * s.rebalancing(i, j);
      used += x + s.rebalancing(i, j);
    }
    total -= net.parking(i) * (s.supply[i] - used);
  }
  return total;
}

double feasibility_violation(const Strategy& s) {
  const std::size_t n = s.nodes();
  double worst = 0.0;
  double fleet = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, -s.idle[i]);
    worst = std::max(worst, -s.supply[i]);
    fleet += s.supply[i];
    double balance = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max({worst, -s.rebalancing(i, j), -s.prices(i, j), s.prices(i, j) - 1.0});
      if (j == i) continue;
      balance += s.rides(i, j) + s.rebalancing(i, j) - s.rides(j, i) - s.rebalancing(j, i);
    }
    worst = std::max(worst, std::abs(balance));
  }
  return std::max(worst, std::abs(fleet - s.fleet));
}

namespace detail {

bool qp_applicable(const ArcMatrix& opponent_prices, const Market& market) {
  const std::size_t n = market.nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (market.demand.matrix(i, j) <= 0.0) continue;
      const auto affine = market.demand_function.own_price_affine(opponent_prices(i, j));
      if (!affine || affine->slope > 0.0) return false;
    }
  return true;
}

PlayerProblem build_player_problem(const ArcMatrix& q, double fleet, const Market& market,
                                   const PlayerProblemOptions& options) {
  const std::size_t n = market.nodes();
  const NetworkModel& net = market.network;
  const ArcMatrix& D = market.demand.matrix;
  const DemandFunction& f = market.demand_function;

  PlayerLayout L;
  L.nodes = n;
  L.fleet = fleet;
  L.regularization = options.regularization;
  L.price_var.assign(n * n, -1);
  L.fixed_price = ArcMatrix(n, 1.0);
  L.intercept = ArcMatrix(n, 0.0);
  L.slope = ArcMatrix(n, 0.0);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = D(i, j);
      if (d <= 0.0) continue;
      if (options.fixed_prices) {
        L.fixed_price(i, j) = (*options.fixed_prices)(i, j);
        L.intercept(i, j) = d * f.eval(L.fixed_price(i, j), q(i, j));
      } else if (options.freeze_prices) {
        L.intercept(i, j) = d * f.eval(1.0, q(i, j));
      } else {
        const auto affine = f.own_price_affine(q(i, j));
        if (!affine || affine->slope > 0.0)
          throw UnsupportedError("demand is not concave-affine in the own price on every arc");
        L.price_var[i * n + j] = static_cast<int>(L.price_count++);
        L.intercept(i, j) = d * affine->intercept;
        L.slope(i, j) = d * affine->slope;
      }
    }

  const Index nn = static_cast<Index>(n * n), nv = static_cast<Index>(n);
  L.rebalancing0 = L.price_count;
  L.supply0 = L.rebalancing0 + nn;
  L.variables = L.supply0 + nv;
  if (options.overflow_penalty) {
    L.overflow0 = L.variables;
    L.variables += nv;
  }

  L.supply_row0 = 0;
  Index row = nv;
  L.lower_row.assign(n * n, -1);
  L.upper_row.assign(n * n, -1);
  for (std::size_t k = 0; k < n * n; ++k)
    if (L.price_var[k] >= 0) {
      L.lower_row[k] = static_cast<int>(row++);
      L.upper_row[k] = static_cast<int>(row++);
    }
  L.rebalancing_row0 = row;
  row += nn;
  L.supply_nonneg_row0 = row;
  row += nv;
  if (options.overflow_penalty) {
    L.overflow_row0 = row;
    row += nv;
  }
  L.inequalities = row;
  L.fleet_row = 0;
  L.flow_row0 = 1;
  L.equalities = 1 + (nv - 1);

  qp::Problem P = qp::Problem::zeros(L.variables, L.equalities, L.inequalities);
  const double eps = options.regularization;

  for (std::size_t i = 0; i < n; ++i) {
    const double pe = net.parking(i);
    const Index srow = L.supply_row0 + static_cast<Index>(i);
    double rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Index r = L.r(i, j);
      P.c(r) = net.rebalancing_cost(i, j) - pe;
      P.P(r, r) = 2.0 * eps;
      P.G(srow, r) = 1.0;
      P.G(L.rebalancing_row0 + static_cast<Index>(i * n + j), r) = -1.0;
      rhs -= L.intercept(i, j);
      const Index p = L.p(i, j);
      if (p < 0) continue;
      const double s = L.slope(i, j), a = L.intercept(i, j);
      P.P(p, p) = -2.0 * s;
      P.c(p) = -(a + s * (pe - net.trip_cost(i, j)));
      P.G(srow, p) = s;
      P.G(L.lower_row[i * n + j], p) = -1.0;
      P.G(L.upper_row[i * n + j], p) = 1.0;
      P.h(L.upper_row[i * n + j]) = 1.0;
    }
    const Index m = L.m(i);
    P.c(m) = pe - 2.0 * eps * fleet / static_cast<double>(n);
    P.P(m, m) = 2.0 * eps;
    P.G(srow, m) = -1.0;
    P.G(L.supply_nonneg_row0 + static_cast<Index>(i), m) = -1.0;
    P.h(srow) = rhs;
    P.A(L.fleet_row, m) = 1.0;
    if (options.overflow_penalty) {
      const Index o = L.overflow0 + static_cast<Index>(i);
      P.c(o) = *options.overflow_penalty;
      P.G(srow, o) = -1.0;
      P.G(L.overflow_row0 + static_cast<Index>(i), o) = -1.0;
    }
  }
  P.b(L.fleet_row) = fleet;

  // Flow balance over non-self-loop arcs; the last node's row is implied.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Index frow = L.flow_row0 + static_cast<Index>(i);
    double rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      P.A(frow, L.r(i, j)) += 1.0;
      P.A(frow, L.r(j, i)) -= 1.0;
      if (const Index p = L.p(i, j); p >= 0) P.A(frow, p) += L.slope(i, j);
      if (const Index p = L.p(j, i); p >= 0) P.A(frow, p) -= L.slope(j, i);
      rhs += L.intercept(j, i) - L.intercept(i, j);
    }
    P.b(frow) = rhs;
  }
  return {std::move(P), std::move(L)};
}

StackOffsets stack(qp::Problem& into, const qp::Problem& other) {
  const StackOffsets off{into.variables(), into.equalities(), into.inequalities()};
  const Index nv = off.variables + other.variables();
  const Index ne = off.equalities + other.equalities();
  const Index ni = off.inequalities + other.inequalities();
  qp::Problem out = qp::Problem::zeros(nv, ne, ni);
  out.P.topLeftCorner(off.variables, off.variables) = into.P;
  out.P.bottomRightCorner(other.variables(), other.variables()) = other.P;
  out.c << into.c, other.c;
  out.A.topLeftCorner(off.equalities, off.variables) = into.A;
  out.A.bottomRightCorner(other.equalities(), other.variables()) = other.A;
  out.b << into.b, other.b;
  out.G.topLeftCorner(off.inequalities, off.variables) = into.G;
  out.G.bottomRightCorner(other.inequalities(), other.variables()) = other.G;
  out.h << into.h, other.h;
  into = std::move(out);
  return off;
}

BestResponse extract(const qp::Problem& problem, const qp::Solution& sol, const PlayerLayout& L, Index eq0,
                     Index in0, const ArcMatrix& q, const Market& market) {
  const std::size_t n = L.nodes;
  const VectorXd& z = sol.z;
  ArcMatrix prices = L.fixed_price;
  ArcMatrix rebalancing(n, 0.0);
  NodeVector supply(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (const Index p = L.p(i, j); p >= 0) prices(i, j) = std::clamp(z(p), 0.0, 1.0);
      rebalancing(i, j) = std::max(0.0, z(L.r(i, j)));
    }
    supply[i] = std::max(0.0, z(L.m(i)));
  }

  BestResponse out;
  out.strategy = make_strategy(std::move(prices), std::move(rebalancing), std::move(supply), L.fleet, q, market);
  out.profit = profit(out.strategy, q, market);

  KktDiagnostics& k = out.kkt;
  k.iterations = sol.iterations;
  k.supply.assign(n, 0.0);
  k.supply_nonneg.assign(n, 0.0);
  k.flow.assign(n, 0.0);
  k.rebalancing = ArcMatrix(n, 0.0);
  k.price_lower = ArcMatrix(n, 0.0);
  k.price_upper = ArcMatrix(n, 0.0);
  const VectorXd& lam = sol.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    k.supply[i] = lam(in0 + L.supply_row0 + static_cast<Index>(i));
    k.supply_nonneg[i] = lam(in0 + L.supply_nonneg_row0 + static_cast<Index>(i));
    if (i + 1 < n) k.flow[i] = sol.y(eq0 + L.flow_row0 + static_cast<Index>(i));
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t a = i * n + j;
      k.rebalancing(i, j) = lam(in0 + L.rebalancing_row0 + static_cast<Index>(a));
      if (L.price_var[a] >= 0) {
        const double unit = L.slope(i, j) < 0.0 ? -L.slope(i, j) : 1.0;
        k.price_lower(i, j) = lam(in0 + L.lower_row[a]) / unit;
        k.price_upper(i, j) = lam(in0 + L.upper_row[a]) / unit;
      }
    }
  }
  k.fleet = sol.y(eq0 + L.fleet_row);

  // Stationarity of the unregularized objective over this player's variables.
  VectorXd grad = problem.P * z + problem.c;
  if (problem.equalities() > 0) grad += problem.A.transpose() * sol.y;
  if (problem.inequalities() > 0) grad += problem.G.transpose() * lam;
  double reg = 0.0;
  const double eps = L.regularization;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Index r = L.r(i, j);
      grad(r) -= 2.0 * eps * z(r);
      reg += eps * z(r) * z(r);
    }
    const Index m = L.m(i);
    const double dm = z(m) - L.fleet / static_cast<double>(n);
    grad(m) -= 2.0 * eps * dm;
    reg += eps * dm * dm;
  }
  k.stationarity_residual = grad.segment(L.offset, L.variables).lpNorm<Eigen::Infinity>();
  k.regularization_cost = reg;

  const VectorXd slack = problem.h - problem.G * z;
  double comp = 0.0, min_mult = 0.0;
  for (Index r = in0; r < in0 + L.inequalities; ++r) {
    comp = std::max(comp, std::abs(lam(r) * slack(r)));
    min_mult = std::min(min_mult, lam(r));
  }
  k.complementarity_residual = comp;
  k.min_multiplier = min_mult;
  k.feasibility_residual = feasibility_violation(out.strategy);
  return out;
}

}  // namespace detail

namespace {

void check_inputs(const ArcMatrix& q, double fleet, const Market& market) {
  market.validate();
  require_shape(q, market.nodes(), "opponent_prices");
  for (double p : q.values())
    if (!(p >= 0.0 && p <= 1.0))
      throw DomainError(fmt::format("opponent price {} outside [0, 1]", p));
  if (!std::isfinite(fleet) || fleet < 0.0)
    throw ValidationError(fmt::format("fleet must be finite and non-negative (got {})", fleet), "fleet");
}

BestResponse zero_fleet(const ArcMatrix& q, const Market& market) {
  BestResponse out;
  out.strategy = exit_strategy(0.0, q, market);
  out.profit = profit(out.strategy, q, market);
  const std::size_t n = market.nodes();
  out.kkt.supply.assign(n, 0.0);
  out.kkt.supply_nonneg.assign(n, 0.0);
  out.kkt.flow.assign(n, 0.0);
  out.kkt.rebalancing = out.kkt.price_lower = out.kkt.price_upper = ArcMatrix(n, 0.0);
  return out;
}

}  // namespace

BestResponse solve_best_response(const ArcMatrix& q, double fleet, const Market& market,
                                 const BestResponseOptions& options) {
  check_inputs(q, fleet, market);
  if (fleet == 0.0) return zero_fleet(q, market);
  double floor_rides = 0.0;
  for (std::size_t i = 0; i < market.nodes(); ++i)
    for (std::size_t j = 0; j < market.nodes(); ++j)
      if (market.demand.matrix(i, j) > 0.0)
        floor_rides += market.demand.matrix(i, j) * market.demand_function.eval(1.0, q(i, j));
  if (floor_rides > fleet * (1.0 + 1e-12))
    throw DomainError(fmt::format("infeasible: even at price 1 the player must serve {:.6g} rides with a fleet of "
                                  "{:.6g}",
                                  floor_rides, fleet));
  if (!options.freeze_prices && !detail::qp_applicable(q, market))
    return solve_best_response_generic(q, fleet, market, options);

  detail::PlayerProblemOptions popts;
  popts.regularization = options.regularization;
  popts.freeze_prices = options.freeze_prices;
  auto [problem, layout] = detail::build_player_problem(q, fleet, market, popts);
  const qp::Solution sol = qp::solve(problem, options.qp);
  BestResponse out = detail::extract(problem, sol, layout, 0, 0, q, market);
  if (!sol.solved())
    throw SolverError(fmt::format("best-response QP stopped: {} after {} iterations", qp::to_string(sol.status),
                                  sol.iterations),
                      std::move(out));
  const KktDiagnostics& k = out.kkt;
  if (k.stationarity_residual > 1e-6 || k.feasibility_residual > 1e-8 || k.complementarity_residual > 1e-6)
    throw SolverError(fmt::format("best response misses the residual contract (stationarity {:.3g}, "
                                  "feasibility {:.3g}, complementarity {:.3g})",
                                  k.stationarity_residual, k.feasibility_residual, k.complementarity_residual),
                      std::move(out));
  return out;
}

KktReport kkt_check(const Strategy& s, const KktDiagnostics& k, const Market& market, const ArcMatrix& q) {
  const std::size_t n = market.nodes();
  const NetworkModel& net = market.network;
  KktReport report;
  auto flow = [&](std::size_t i, std::size_t j) { return i == j ? 0.0 : k.flow[i] - k.flow[j]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ArcKkt arc;
      arc.i = i;
      arc.j = j;
      const double pe = net.parking(i);
      const double coupling = k.supply[i] + flow(i, j);
      arc.rebalancing_residual = net.rebalancing_cost(i, j) - pe + coupling - k.rebalancing(i, j);
      report.stationarity_residual = std::max(report.stationarity_residual, std::abs(arc.rebalancing_residual));
      const auto affine = market.demand.matrix(i, j) > 0.0 ? market.demand_function.own_price_affine(q(i, j))
                                                           : std::nullopt;
      if (affine && affine->slope < 0.0) {
        const double p = s.prices(i, j);
        const double ratio = affine->intercept / affine->slope;
        arc.interior = p > 0.0 && p < 1.0;
        arc.price_residual = 2.0 * p + ratio + pe - net.trip_cost(i, j) - coupling - k.price_lower(i, j) +
                             k.price_upper(i, j);
        arc.combined_price = 0.5 * (-ratio + k.rebalancing(i, j) - net.rebalancing_penalty()(i, j));
        report.stationarity_residual = std::max(report.stationarity_residual, std::abs(arc.price_residual));
      }
      report.arcs.push_back(arc);
    }
  }
  return report;
}

std::vector<PriceFloorViolation> price_floor_check(const Strategy& s, const DemandSpec& demand, double floor,
                                                   double tolerance) {
  std::vector<PriceFloorViolation> out;
  const std::size_t n = s.nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double p = s.prices(i, j);
      if (demand.matrix(i, j) > 0.0 && p < kExitPrice && p < floor - tolerance) out.push_back({i, j, p});
    }
  return out;
}

}  // namespace fleetgame
