#include "fleetgame/potential.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "player_qp.hpp"

namespace fleetgame {

using Eigen::Index;

double cross_partial_gap(const DemandFunction& f, double p_a, double p_b) {
  const double a = f.gradient_or_fd(p_a, p_b).d_other + p_a * f.cross_partial(p_a, p_b);
  const double b = f.gradient_or_fd(p_b, p_a).d_other + p_b * f.cross_partial(p_b, p_a);
  return a - b;
}

namespace {

std::optional<CrossPartialWitness> find_witness(const DemandFunction& f) {
  static constexpr double kGrid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (double pa : kGrid)
    for (double pb : kGrid) {
      const double gap = cross_partial_gap(f, pa, pb);
      if (std::abs(gap) > 1e-6) return CrossPartialWitness{pa, pb, gap};
    }
  return std::nullopt;
}

}  // namespace

PotentialDecision potential_admissible(const DemandFunction& f) {
  PotentialDecision d;
  const bool separable = f.kind() == DemandFunction::Kind::Separable ||
                         f.kind() == DemandFunction::Kind::SeparableLinear;
  if (separable) {
    if (const auto c = is_separable_linear(f)) {
      d.admissible = true;
      d.slope = c;
      d.reason = fmt::format("separable with h(p) = {} p", *c);
      return d;
    }
    d.witness = find_witness(f);
    d.reason = "separable but h is not of the form C p with C > 0";
    return d;
  }
  d.witness = find_witness(f);
  d.reason = d.witness ? fmt::format("cross partials differ by {:.6g} per unit demand at ({}, {})", d.witness->gap,
                                     d.witness->p_a, d.witness->p_b)
                       : "not separable; no symmetry violation found on the sample grid, but no potential is known";
  return d;
}

PotentialFunction PotentialFunction::build(const Market& market) {
  const PotentialDecision d = potential_admissible(market.demand_function);
  if (!d.admissible)
    throw UnsupportedError(fmt::format("demand function '{}' admits no exact potential: {}",
                                       market.demand_function.id(), d.reason));
  return PotentialFunction(market, *d.slope);
}

double PotentialFunction::operator()(const Strategy& a, const Strategy& b) const {
  const std::size_t n = market_.nodes();
  const NetworkModel& net = market_.network;
  const ArcMatrix& D = market_.demand.matrix;
  const UnivariateTerm& g = *market_.demand_function.own_term();
  double phi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pe = net.parking(i);
    phi -= pe * (a.supply[i] + b.supply[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const double pa = a.prices(i, j), pb = b.prices(i, j);
      const double ga = g.value(pa), gb = g.value(pb);
      phi += D(i, j) * (pa * ga + pb * gb + (pe - net.trip_cost(i, j)) * (ga + gb));
      phi += slope_ * D(i, j) * pa * pb;
      phi += (pe - net.rebalancing_cost(i, j)) * (a.rebalancing(i, j) + b.rebalancing(i, j));
    }
  }
  return phi;
}

EquilibriumResult solve_via_potential(const ScenarioSpec& spec, const PotentialOptions& options) {
  spec.validate();
  if (spec.mode != Mode::Duopoly) throw UnsupportedError("the potential method applies to duopoly scenarios only");
  const Market market = spec.market();
  const PotentialFunction phi = PotentialFunction::build(market);
  const auto g = market.demand_function.own_term()->as_affine();
  if (!g) throw UnsupportedError("the potential method needs an affine own-price term g");
  const double C = phi.slope();
  if (2.0 * std::abs(g->slope) < C || g->slope > 0.0)
    throw UnsupportedError(fmt::format("potential is not concave: need 2|g'| >= C (g' = {}, C = {})", g->slope, C));

  const auto [fleet_a, fleet_b] = fleet_sizes(spec);
  const std::size_t n = market.nodes();
  const ArcMatrix& D = market.demand.matrix;
  ArcMatrix qa(n, spec.solver.init_price), qb(n, spec.solver.init_price);

  detail::PlayerProblemOptions popts;
  popts.regularization = options.best_response.regularization;

  EquilibriumResult r;
  r.method = Method::Potential;
  r.mode = Mode::Duopoly;
  for (int round = 1; round <= options.max_rounds; ++round) {
    auto [problem, la] = detail::build_player_problem(qb, fleet_a, market, popts);
    auto pb_build = detail::build_player_problem(qa, fleet_b, market, popts);
    detail::PlayerLayout lb = std::move(pb_build.layout);
    const detail::StackOffsets off = detail::stack(problem, pb_build.problem);
    lb.offset = off.variables;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Index xa = la.p(i, j), xb = lb.p(i, j);
        if (xa < 0 || xb < 0) continue;
        // Move the opponent-price part of the revenue into the joint quadratic.
        problem.c(xa) += D(i, j) * C * qb(i, j);
        problem.c(xb) += D(i, j) * C * qa(i, j);
        problem.P(xa, xb) = problem.P(xb, xa) = -C * D(i, j);
      }
    const qp::Solution sol = qp::solve(problem, options.best_response.qp);
    BestResponse ba = detail::extract(problem, sol, la, 0, 0, qb, market);
    BestResponse bb = detail::extract(problem, sol, lb, off.equalities, off.inequalities, qa, market);
    if (!sol.solved())
      throw SolverError(fmt::format("potential QP stopped: {} in round {}", qp::to_string(sol.status), round),
                        std::move(ba));

    r.residual_a = max_abs_diff(ba.strategy.prices, qa);
    r.residual_b = max_abs_diff(bb.strategy.prices, qb);
    qa = ba.strategy.prices;
    qb = bb.strategy.prices;
    r.a = std::move(ba.strategy);
    r.b = std::move(bb.strategy);
    r.kkt_a = std::move(ba.kkt);
    r.kkt_b = std::move(bb.kkt);
    r.iterations = round;
    r.trace.push_back({round, qa, qb, profit(r.a, qb, market), profit(r.b, qa, market), r.residual_a,
                       r.residual_b});
    if (std::max(r.residual_a, r.residual_b) <= options.tolerance) {
      r.converged = true;
      break;
    }
  }
  refresh_derived(r.a, r.b.prices, market);
  refresh_derived(r.b, r.a.prices, market);
  r.profit_a = profit(r.a, r.b.prices, market);
  r.profit_b = profit(r.b, r.a.prices, market);
  if (!r.converged)
    r.warnings.push_back(fmt::format("constraint coupling did not settle within {} rounds", r.iterations));
  return r;
}

}  // namespace fleetgame
