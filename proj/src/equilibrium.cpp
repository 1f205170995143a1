#include "fleetgame/equilibrium.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>

#include <fmt/format.h>

namespace fleetgame {

std::string_view to_string(Player player) { return player == Player::A ? "A" : "B"; }
std::string_view to_string(Method method) {
  return method == Method::BestResponse ? "best-response" : "potential";
}

namespace {

using Clock = std::chrono::steady_clock;

BestResponseOptions with_deadline(BestResponseOptions options, const SolverConfig& config,
                                  Clock::time_point start) {
  if (config.time_budget_seconds > 0.0 && !options.deadline)
    options.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(config.time_budget_seconds));
  return options;
}

bool expired(const BestResponseOptions& options) {
  return options.deadline && Clock::now() >= *options.deadline;
}

void finalize(EquilibriumResult& r, const Market& market) {
  refresh_derived(r.a, r.b.prices, market);
  refresh_derived(r.b, r.a.prices, market);
  r.profit_a = profit(r.a, r.b.prices, market);
  r.profit_b = profit(r.b, r.a.prices, market);
  const double slack = std::max(feasibility_violation(r.a), feasibility_violation(r.b));
  if (slack > 1e-4 * std::max(1.0, r.a.fleet + r.b.fleet))
    r.warnings.push_back(fmt::format(
        "stored strategies were computed against the previous opponent iterate; "
        "constraint slack {:.3g} against the final prices",
        slack));
}

}  // namespace

bool detect_oscillation(const std::vector<TraceEntry>& trace, double eps) {
  if (trace.size() < 6) return false;
  const auto* e = &trace[trace.size() - 6];
  auto dist = [&](int x, int y) {
    return std::max(max_abs_diff(e[x].prices_a, e[y].prices_a), max_abs_diff(e[x].prices_b, e[y].prices_b));
  };
  for (int k = 0; k + 2 < 6; ++k)
    if (dist(k, k + 2) > eps) return false;
  return dist(4, 5) > eps;
}

EquilibriumResult iterate_best_response(const ScenarioSpec& spec, const std::optional<ArcMatrix>& initial_b,
                                        const BestResponseOptions& base_options) {
  spec.validate();
  const auto start = Clock::now();
  const Market market = spec.market();
  const auto [fleet_a, fleet_b] = fleet_sizes(spec);
  const SolverConfig& cfg = spec.solver;
  const BestResponseOptions options = with_deadline(base_options, cfg, start);
  const std::size_t n = market.nodes();

  ArcMatrix prev_a(n, cfg.init_price);
  ArcMatrix prev_b = initial_b.value_or(ArcMatrix(n, cfg.init_price));
  if (prev_b.nodes() != n) throw ValidationError("initial prices do not match the network", "initial_prices");

  EquilibriumResult r;
  r.method = Method::BestResponse;
  r.mode = Mode::Duopoly;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    BestResponse ba, bb;
    if (cfg.order == Order::AFirst) {
      ba = solve_best_response(prev_b, fleet_a, market, options);
      bb = solve_best_response(ba.strategy.prices, fleet_b, market, options);
    } else {
      bb = solve_best_response(prev_a, fleet_b, market, options);
      ba = solve_best_response(bb.strategy.prices, fleet_a, market, options);
    }
    r.residual_a = max_abs_diff(ba.strategy.prices, prev_a);
    r.residual_b = max_abs_diff(bb.strategy.prices, prev_b);
    prev_a = ba.strategy.prices;
    prev_b = bb.strategy.prices;
    r.a = std::move(ba.strategy);
    r.b = std::move(bb.strategy);
    r.kkt_a = std::move(ba.kkt);
    r.kkt_b = std::move(bb.kkt);
    r.iterations = k;
    r.trace.push_back({k, prev_a, prev_b, ba.profit, bb.profit, r.residual_a, r.residual_b});
    if (r.residual_a <= cfg.eps && r.residual_b <= cfg.eps) {
      r.converged = true;
      break;
    }
    if (expired(options)) {
      r.timed_out = true;
      break;
    }
  }
  finalize(r, market);
  r.oscillating = !r.converged && detect_oscillation(r.trace, cfg.eps);
  if (!r.converged)
    r.warnings.push_back(r.timed_out ? fmt::format("time budget exhausted after {} iterations", r.iterations)
                                     : fmt::format("no convergence within {} iterations", r.iterations));
  if (r.oscillating) r.warnings.push_back("period-2 oscillation in the last six iterates");
  return r;
}

std::vector<ArcMatrix> multistart_initial_prices(const ScenarioSpec& spec, int starts) {
  const std::size_t n = spec.network.node_count();
  std::vector<ArcMatrix> inits;
  inits.emplace_back(n, spec.solver.init_price);
  for (int s = 1; s <= starts; ++s) {
    std::mt19937_64 rng(spec.solver.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ArcMatrix m(n);
    for (double& v : m.values()) v = unit(rng);
    inits.push_back(std::move(m));
  }
  return inits;
}

std::vector<EquilibriumResult> multistart_serial(const ScenarioSpec& spec, int starts,
                                                 const BestResponseOptions& options) {
  std::vector<EquilibriumResult> out;
  for (const ArcMatrix& init : multistart_initial_prices(spec, starts))
    out.push_back(iterate_best_response(spec, init, options));
  return out;
}

std::vector<EquilibriumResult> multistart(const ScenarioSpec& spec, int starts, const BestResponseOptions& options) {
  const std::vector<ArcMatrix> inits = multistart_initial_prices(spec, starts);
  const int count = static_cast<int>(inits.size());
  std::vector<EquilibriumResult> out(inits.size());
  std::vector<std::exception_ptr> errors(inits.size());
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < count; ++s) {
    try {
      out[s] = iterate_best_response(spec, inits[s], options);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double multistart_spread(const std::vector<EquilibriumResult>& runs) {
  double spread = 0.0;
  for (std::size_t s = 1; s < runs.size(); ++s)
    spread = std::max({spread, max_abs_diff(runs[s].a.prices, runs[0].a.prices),
                       max_abs_diff(runs[s].b.prices, runs[0].b.prices)});
  return spread;
}

EquilibriumResult solve_monopoly(const ScenarioSpec& spec, Player monopolist, const BestResponseOptions& options) {
  spec.validate();
  const Market market = spec.market();
  const auto [fleet_a, fleet_b] = fleet_sizes(spec);
  const std::size_t n = market.nodes();
  const ArcMatrix ones(n, 1.0);
  const bool a_rules = monopolist == Player::A;

  BestResponse active = solve_best_response(ones, a_rules ? fleet_a : fleet_b, market, options);
  BestResponseOptions frozen_opts = options;
  frozen_opts.freeze_prices = true;
  BestResponse frozen =
      solve_best_response(active.strategy.prices, a_rules ? fleet_b : fleet_a, market, frozen_opts);

  EquilibriumResult r;
  r.method = Method::BestResponse;
  r.mode = a_rules ? Mode::MonopolyA : Mode::MonopolyB;
  r.a = a_rules ? std::move(active.strategy) : std::move(frozen.strategy);
  r.b = a_rules ? std::move(frozen.strategy) : std::move(active.strategy);
  r.kkt_a = a_rules ? std::move(active.kkt) : std::move(frozen.kkt);
  r.kkt_b = a_rules ? std::move(frozen.kkt) : std::move(active.kkt);
  r.iterations = 1;
  r.converged = true;
  finalize(r, market);
  r.trace.push_back({1, r.a.prices, r.b.prices, r.profit_a, r.profit_b, 0.0, 0.0});
  return r;
}

DeviationReport verify_equilibrium(const EquilibriumResult& result, const ScenarioSpec& spec,
                                   std::optional<double> tolerance, const BestResponseOptions& options) {
  const Market market = spec.market();
  BestResponseOptions frozen = options;
  frozen.freeze_prices = true;
  const BestResponseOptions& opts_a = result.mode == Mode::MonopolyB ? frozen : options;
  const BestResponseOptions& opts_b = result.mode == Mode::MonopolyA ? frozen : options;

  const double stored_a = profit(result.a, result.b.prices, market);
  const double stored_b = profit(result.b, result.a.prices, market);
  const BestResponse ra = solve_best_response(result.b.prices, result.a.fleet, market, opts_a);
  const BestResponse rb = solve_best_response(result.a.prices, result.b.fleet, market, opts_b);

  DeviationReport rep;
  rep.gain_a = ra.profit - stored_a;
  rep.gain_b = rb.profit - stored_b;
  rep.tolerance_a = tolerance.value_or(1e-4 * std::max(1.0, std::abs(stored_a)));
  rep.tolerance_b = tolerance.value_or(1e-4 * std::max(1.0, std::abs(stored_b)));
  rep.certified = rep.gain_a <= rep.tolerance_a && rep.gain_b <= rep.tolerance_b;
  return rep;
}

EquilibriumResult solve(const ScenarioSpec& spec, const BestResponseOptions& options) {
  EquilibriumResult r;
  switch (spec.mode) {
    case Mode::Duopoly: r = iterate_best_response(spec, std::nullopt, options); break;
    case Mode::MonopolyA: r = solve_monopoly(spec, Player::A, options); break;
    case Mode::MonopolyB: r = solve_monopoly(spec, Player::B, options); break;
  }
  r.verification = verify_equilibrium(r, spec, std::nullopt, options);
  if (spec.mode == Mode::Duopoly && spec.solver.multistart > 0) {
    const auto runs = multistart(spec, spec.solver.multistart, options);
    const double spread = multistart_spread(runs);
    if (spread > spec.solver.multistart_tolerance)
      r.warnings.push_back(fmt::format("multistart runs disagree: price spread {:.4g} exceeds {:.4g}", spread,
                                       spec.solver.multistart_tolerance));
  }
  return r;
}

}  // namespace fleetgame
