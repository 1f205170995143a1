#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "fleetgame/best_response.hpp"
#include "player_qp.hpp"

namespace fleetgame {
namespace {

using Eigen::Index;

struct Evaluation {
  double value = -std::numeric_limits<double>::infinity();
  ArcMatrix gradient;
  double overflow = 0.0;
  detail::PlayerProblem problem;
  qp::Solution solution;
};

class FlowOracle {
 public:
  FlowOracle(const ArcMatrix& q, double fleet, const Market& market, const BestResponseOptions& options)
      : q_(q), fleet_(fleet), market_(market), options_(options) {
    const NetworkModel& net = market.network;
    double pe = 0.0, pc = 0.0;
    for (double v : net.parking_cost()) pe = std::max(pe, v);
    for (std::size_t i = 0; i < net.node_count(); ++i)
      for (std::size_t j = 0; j < net.node_count(); ++j) pc = std::max(pc, net.rebalancing_cost(i, j));
    penalty_ = 10.0 * (1.0 + pe + pc);
  }

  /// Penalized profit at fixed prices, with its envelope gradient.
  Evaluation evaluate(const ArcMatrix& prices) const {
    const std::size_t n = market_.nodes();
    const NetworkModel& net = market_.network;
    const ArcMatrix& D = market_.demand.matrix;
    const DemandFunction& f = market_.demand_function;

    detail::PlayerProblemOptions popts;
    popts.regularization = options_.regularization;
    popts.fixed_prices = &prices;
    popts.overflow_penalty = penalty_;
    Evaluation e;
    e.problem = detail::build_player_problem(q_, fleet_, market_, popts);
    e.solution = qp::solve(e.problem.problem, options_.qp);
    if (!e.solution.z.allFinite()) return e;
    const auto& L = e.problem.layout;
    const auto& lam = e.solution.lambda;
    auto node_flow = [&](std::size_t i) {
      return i + 1 < n ? e.solution.y(L.flow_row0 + static_cast<Index>(i)) : 0.0;
    };

    double value = -e.solution.objective;
    e.gradient = ArcMatrix(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      e.overflow += std::max(0.0, e.solution.z(L.overflow0 + static_cast<Index>(i)));
      const double K = lam(L.supply_row0 + static_cast<Index>(i));
      for (std::size_t j = 0; j < n; ++j) {
        if (D(i, j) <= 0.0) continue;
        const double p = prices(i, j);
        const double x = L.intercept(i, j);
        const double margin = p - net.trip_cost(i, j) + net.parking(i);
        value += margin * x;
        const double shadow = K + (i == j ? 0.0 : node_flow(i) - node_flow(j));
        const double dshare = f.gradient_or_fd(p, q_(i, j)).d_own;
        e.gradient(i, j) = x + (margin - shadow) * D(i, j) * dshare;
      }
    }
    // Undo the constant part of the regularization so values compare across prices.
    const double mean = fleet_ / static_cast<double>(n);
    value += options_.regularization * static_cast<double>(n) * mean * mean;
    e.value = value;
    return e;
  }

 private:
  const ArcMatrix& q_;
  double fleet_;
  const Market& market_;
  const BestResponseOptions& options_;
  double penalty_ = 0.0;
};

ArcMatrix project(ArcMatrix p, const ArcMatrix& demand) {
  const std::size_t n = p.nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = demand(i, j) > 0.0 ? std::clamp(p(i, j), 0.0, 1.0) : 1.0;
  return p;
}

bool past(const std::optional<std::chrono::steady_clock::time_point>& deadline) {
  return deadline && std::chrono::steady_clock::now() >= *deadline;
}

struct Ascent {
  ArcMatrix prices;
  Evaluation eval;
  int steps = 0;
};

Ascent ascend(ArcMatrix start, const FlowOracle& oracle, const ArcMatrix& demand,
              const BestResponseOptions& options) {
  Ascent a{project(std::move(start), demand), {}, 0};
  a.eval = oracle.evaluate(a.prices);
  double step = 1.0 / std::max(1.0, demand.max_abs());
  for (; a.steps < options.max_gradient_steps && !past(options.deadline); ++a.steps) {
    bool moved = false;
    for (int tries = 0; tries < 60; ++tries) {
      ArcMatrix trial = a.prices;
      auto tv = trial.values();
      const auto g = a.eval.gradient.values();
      for (std::size_t k = 0; k < tv.size(); ++k) tv[k] += step * g[k];
      trial = project(std::move(trial), demand);
      double ascent = 0.0;
      for (std::size_t k = 0; k < tv.size(); ++k) ascent += g[k] * (trial.values()[k] - a.prices.values()[k]);
      if (max_abs_diff(trial, a.prices) < 1e-12) break;
      Evaluation e = oracle.evaluate(trial);
      if (e.value >= a.eval.value + 1e-4 * ascent) {
        const double change = max_abs_diff(trial, a.prices);
        a.prices = std::move(trial);
        a.eval = std::move(e);
        step *= 2.0;
        moved = change > 1e-10;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return a;
}

// Zeroes components that push a price out of [0, 1] or sit on an arc without
// demand.
ArcMatrix feasible_direction(ArcMatrix g, const ArcMatrix& prices, const ArcMatrix& demand) {
  auto gv = g.values();
  const auto pv = prices.values(), dv = demand.values();
  for (std::size_t k = 0; k < gv.size(); ++k)
    if (dv[k] <= 0.0 || (pv[k] <= 0.0 && gv[k] < 0.0) || (pv[k] >= 1.0 && gv[k] > 0.0)) gv[k] = 0.0;
  return g;
}

// Minimum-norm element of the convex hull of `gradients`.
ArcMatrix min_norm_combination(const std::vector<ArcMatrix>& gradients) {
  const Index k = static_cast<Index>(gradients.size());
  const Index dim = static_cast<Index>(gradients.front().size());
  Eigen::MatrixXd G(dim, k);
  for (Index c = 0; c < k; ++c)
    for (Index r = 0; r < dim; ++r) G(r, c) = gradients[c].values()[r];
  qp::Problem p = qp::Problem::zeros(k, 1, k);
  p.P = G.transpose() * G + 1e-12 * Eigen::MatrixXd::Identity(k, k);
  p.A.setOnes();
  p.b(0) = 1.0;
  p.G = -Eigen::MatrixXd::Identity(k, k);
  const qp::Solution s = qp::solve(p);
  const Eigen::VectorXd w = s.z.cwiseMax(0.0) / std::max(1e-300, s.z.cwiseMax(0.0).sum());
  ArcMatrix d(gradients.front().nodes(), 0.0);
  auto dv = d.values();
  for (Index c = 0; c < k; ++c)
    for (Index r = 0; r < dim; ++r) dv[r] += w(c) * gradients[c].values()[r];
  return d;
}

// Gradient sampling: the profit is concave but kinked where flow constraints
// switch, and plain gradient ascent stalls on such ridges.
void polish(Ascent& a, const FlowOracle& oracle, const ArcMatrix& demand, const BestResponseOptions& options,
            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const std::size_t dim = a.prices.size();
  const double scale = std::max(1.0, demand.max_abs());
  int budget = options.max_gradient_steps;
  for (double radius = 1e-2; radius >= 1e-7 && budget > 0 && !past(options.deadline);) {
    std::vector<ArcMatrix> grads{feasible_direction(a.eval.gradient, a.prices, demand)};
    for (std::size_t s = 0; s < 2 * dim + 1; ++s) {
      ArcMatrix probe = a.prices;
      for (double& v : probe.values()) v += radius * sym(rng);
      probe = project(std::move(probe), demand);
      grads.push_back(feasible_direction(oracle.evaluate(probe).gradient, a.prices, demand));
    }
    const ArcMatrix d = min_norm_combination(grads);
    const double norm = d.max_abs();
    if (norm <= 1e-9 * scale) {
      radius *= 0.1;
      continue;
    }
    bool moved = false;
    for (double t = radius / norm * 10.0; t * norm > 1e-12; t *= 0.5) {
      --budget;
      ArcMatrix trial = a.prices;
      auto tv = trial.values();
      for (std::size_t k = 0; k < dim; ++k) tv[k] += t * d.values()[k];
      trial = project(std::move(trial), demand);
      Evaluation e = oracle.evaluate(trial);
      if (e.value > a.eval.value + 1e-12 * std::abs(a.eval.value)) {
        a.prices = std::move(trial);
        a.eval = std::move(e);
        moved = true;
        break;
      }
    }
    ++a.steps;
    if (!moved) radius *= 0.1;
  }
}

}  // namespace

BestResponse solve_best_response_generic(const ArcMatrix& q, double fleet, const Market& market,
                                         const BestResponseOptions& options) {
  const std::size_t n = market.nodes();
  const ArcMatrix& D = market.demand.matrix;
  if (fleet == 0.0) return solve_best_response(q, fleet, market, options);

  const FlowOracle oracle(q, fleet, market, options);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::optional<Ascent> best;
  int total_steps = 0;
  const int starts = std::max(1, options.multistarts);
  for (int s = 0; s < starts; ++s) {
    ArcMatrix start(n, 0.75);
    if (s > 0)
      for (double& v : start.values()) v = unit(rng);
    Ascent a = ascend(std::move(start), oracle, D, options);
    total_steps += a.steps;
    if (!best || a.eval.value > best->eval.value) best = std::move(a);
    if (past(options.deadline)) break;
  }
  const int before = best->steps;
  polish(*best, oracle, D, options, rng);
  total_steps += best->steps - before;

  const auto& e = best->eval;
  BestResponse out = detail::extract(e.problem.problem, e.solution, e.problem.layout, 0, 0, q, market);
  out.kkt.non_convex = true;
  out.kkt.gradient_source = market.demand_function.has_analytic_gradient() ? "analytic" : "finite-difference";
  out.kkt.iterations = total_steps;
  if (!e.solution.solved() || e.overflow > 1e-6)
    throw SolverError(fmt::format("generic best response infeasible (overflow {:.3g})", e.overflow),
                      std::move(out));
  return out;
}

}  // namespace fleetgame
