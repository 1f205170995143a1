#include "fleetgame/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <omp.h>

namespace fleetgame {

namespace {

PlayerMetrics player_metrics(const Strategy& s, double profit, const ArcMatrix& demand) {
  PlayerMetrics m;
  m.fleet = s.fleet;
  m.profit = profit;
  m.prices = s.prices;
  m.rides = s.rides;
  m.rebalancing = s.rebalancing;
  m.supply = s.supply;
  m.idle = s.idle;
  m.utilization = s.fleet > 0.0 ? s.rides.sum() / s.fleet : 0.0;
  const std::size_t n = demand.nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (demand(i, j) > 0.0 && s.prices(i, j) >= kExitPrice) m.exit_arcs.push_back({i, j});
  return m;
}

}  // namespace

RunMetrics compute_metrics(const EquilibriumResult& r, const ScenarioSpec& spec) {
  RunMetrics m;
  m.name = spec.name;
  m.mode = r.mode;
  m.converged = r.converged;
  m.iterations = r.iterations;
  m.demand = spec.demand().matrix;
  m.a = player_metrics(r.a, r.profit_a, m.demand);
  m.b = player_metrics(r.b, r.profit_b, m.demand);
  m.total_demand = m.demand.sum();
  m.total_market_served = r.a.rides.sum() + r.b.rides.sum();
  m.total_rebalancing = r.a.rebalancing.sum() + r.b.rebalancing.sum();
  return m;
}

ScenarioRun run_scenario(const ScenarioSpec& spec, const BestResponseOptions& options) {
  try {
    EquilibriumResult result = solve(spec, options);
    RunMetrics metrics = compute_metrics(result, spec);
    return {std::move(metrics), std::move(result)};
  } catch (const SolverError& e) {
    throw SolverError(fmt::format("scenario '{}': {}", spec.name, e.what()), e.best());
  }
}

std::vector<MarketExit> detect_market_exit(const RunMetrics& metrics) {
  std::vector<MarketExit> out;
  for (const ArcIndex& a : metrics.a.exit_arcs) out.push_back({Player::A, a});
  for (const ArcIndex& a : metrics.b.exit_arcs) out.push_back({Player::B, a});
  return out;
}

namespace {

NodeVector minus(const NodeVector& x, const NodeVector& y) {
  NodeVector d(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) d[k] = x[k] - y[k];
  return d;
}

PlayerDelta delta(const PlayerMetrics& before, const PlayerMetrics& after) {
  return {after.profit - before.profit, after.prices - before.prices, after.rides - before.rides,
          after.rebalancing - before.rebalancing, minus(after.supply, before.supply), minus(after.idle, before.idle)};
}

constexpr double kFlowNoise = 1e-6;

void describe_changes(std::string_view who, const PlayerMetrics& before, const PlayerMetrics& after,
                      std::vector<std::string>& out) {
  const std::size_t n = before.idle.size();
  std::vector<std::size_t> lost, gained;
  for (std::size_t i = 0; i < n; ++i) {
    const bool was = before.idle[i] > kFlowNoise, is = after.idle[i] > kFlowNoise;
    if (was && !is) lost.push_back(i);
    if (!was && is) gained.push_back(i);
  }
  if (lost.size() == 1 && gained.size() == 1) {
    out.push_back(fmt::format("{}: idle vehicles moved from node {} to node {}", who, lost[0] + 1, gained[0] + 1));
  } else {
    for (std::size_t i : lost) out.push_back(fmt::format("{}: idling stops at node {}", who, i + 1));
    for (std::size_t i : gained) out.push_back(fmt::format("{}: idling starts at node {}", who, i + 1));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool was = before.rebalancing(i, j) > kFlowNoise, is = after.rebalancing(i, j) > kFlowNoise;
      if (was != is)
        out.push_back(fmt::format("{}: rebalancing on e{}{} {}", who, i + 1, j + 1, is ? "starts" : "stops"));
    }
  auto has = [](const std::vector<ArcIndex>& v, ArcIndex a) { return std::find(v.begin(), v.end(), a) != v.end(); };
  for (const ArcIndex& a : after.exit_arcs)
    if (!has(before.exit_arcs, a)) out.push_back(fmt::format("{}: exits e{}{}", who, a.i + 1, a.j + 1));
  for (const ArcIndex& a : before.exit_arcs)
    if (!has(after.exit_arcs, a)) out.push_back(fmt::format("{}: re-enters e{}{}", who, a.i + 1, a.j + 1));
}

bool zero(const ArcMatrix& m, double tol) { return m.max_abs() <= tol; }
bool zero(const NodeVector& v, double tol) {
  return std::all_of(v.begin(), v.end(), [tol](double x) { return std::abs(x) <= tol; });
}

}  // namespace

bool RunComparison::all_zero(double tol) const {
  for (const PlayerDelta* d : {&a, &b})
    if (std::abs(d->profit) > tol || !zero(d->prices, tol) || !zero(d->rides, tol) || !zero(d->rebalancing, tol) ||
        !zero(d->supply, tol) || !zero(d->idle, tol))
      return false;
  return std::abs(total_market_served) <= tol && std::abs(total_rebalancing) <= tol;
}

RunComparison compare_runs(const RunMetrics& before, const RunMetrics& after) {
  if (before.demand.nodes() != after.demand.nodes())
    throw ValidationError(fmt::format("cannot compare a {}-node run with a {}-node run", before.demand.nodes(),
                                      after.demand.nodes()));
  RunComparison c;
  c.a = delta(before.a, after.a);
  c.b = delta(before.b, after.b);
  c.total_market_served = after.total_market_served - before.total_market_served;
  c.total_rebalancing = after.total_rebalancing - before.total_rebalancing;
  describe_changes("A", before.a, after.a, c.highlights);
  describe_changes("B", before.b, after.b, c.highlights);
  return c;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SweepAxisKind kind) {
  switch (kind) {
    case SweepAxisKind::DemandMultiplier: return "m";
    case SweepAxisKind::Alpha: return "alpha";
    case SweepAxisKind::FleetFraction: return "beta";
    case SweepAxisKind::Pattern: return "pattern";
    case SweepAxisKind::Parking: return "parking_cost";
    case SweepAxisKind::Penalty: return "rebalancing_penalty";
  }
  return "?";
}

SweepAxisKind parse_axis(std::string_view name) {
  for (auto k : {SweepAxisKind::DemandMultiplier, SweepAxisKind::Alpha, SweepAxisKind::FleetFraction,
                 SweepAxisKind::Pattern, SweepAxisKind::Parking, SweepAxisKind::Penalty})
    if (to_string(k) == name) return k;
  throw ValidationError(fmt::format("unknown sweep axis '{}' (expected m, alpha, beta, pattern, parking_cost or "
                                    "rebalancing_penalty)",
                                    name),
                        "axes");
}

std::string format_axis_value(const AxisValue& value) {
  struct Visitor {
    std::string operator()(double v) const { return fmt::format("{}", v); }
    std::string operator()(DemandPattern p) const { return std::string(to_string(p)); }
    std::string operator()(const NodeVector& v) const { return fmt::format("[{}]", fmt::join(v, ";")); }
    std::string operator()(const ArcMatrix& m) const {
      std::vector<std::string> rows;
      for (const auto& r : m.rows()) rows.push_back(fmt::format("[{}]", fmt::join(r, ";")));
      return fmt::format("[{}]", fmt::join(rows, ";"));
    }
  };
  return std::visit(Visitor{}, value);
}

namespace {

bool value_fits(SweepAxisKind kind, const AxisValue& v) {
  switch (kind) {
    case SweepAxisKind::DemandMultiplier:
    case SweepAxisKind::Alpha:
    case SweepAxisKind::FleetFraction: return std::holds_alternative<double>(v);
    case SweepAxisKind::Pattern: return std::holds_alternative<DemandPattern>(v);
    case SweepAxisKind::Parking: return std::holds_alternative<NodeVector>(v);
    case SweepAxisKind::Penalty: return std::holds_alternative<ArcMatrix>(v);
  }
  return false;
}

void apply(ScenarioSpec& spec, SweepAxisKind kind, const AxisValue& v) {
  switch (kind) {
    case SweepAxisKind::DemandMultiplier: spec.demand_multiplier = std::get<double>(v); break;
    case SweepAxisKind::Alpha: spec.alpha = std::get<double>(v); break;
    case SweepAxisKind::FleetFraction: spec.fleet_fraction = std::get<double>(v); break;
    case SweepAxisKind::Pattern: spec.pattern = std::get<DemandPattern>(v); break;
    case SweepAxisKind::Parking: spec.network = spec.network.with_parking_cost(std::get<NodeVector>(v)); break;
    case SweepAxisKind::Penalty:
      spec.network = spec.network.with_rebalancing_penalty(std::get<ArcMatrix>(v));
      break;
  }
}

}  // namespace

void SweepSpec::validate() const {
  if (axes.empty()) throw ValidationError("sweep needs at least one axis", "axes");
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const std::string field = fmt::format("axes/{}", a);
    if (axes[a].values.empty())
      throw ValidationError(fmt::format("sweep axis '{}' has no values", to_string(axes[a].kind)), field);
    for (const AxisValue& v : axes[a].values)
      if (!value_fits(axes[a].kind, v))
        throw ValidationError(fmt::format("sweep axis '{}' has a value of the wrong type", to_string(axes[a].kind)),
                              field);
    if (mode == SweepMode::Zip && axes[a].values.size() != axes[0].values.size())
      throw ValidationError("zipped sweep axes must all have the same length", field);
  }
}

std::vector<SweepPoint> SweepSpec::expand() const {
  validate();
  std::vector<SweepPoint> points;
  auto emit = [&](const std::vector<std::size_t>& idx) {
    SweepPoint p;
    p.index = points.size();
    p.spec = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const AxisValue& v = axes[a].values[idx[a]];
      p.labels.push_back(format_axis_value(v));
      try {
        apply(p.spec, axes[a].kind, v);
      } catch (const Error& e) {
        if (p.error.empty()) p.error = e.what();
      }
    }
    p.spec.name = fmt::format("{}#{}", base.name, p.index);
    points.push_back(std::move(p));
  };
  if (mode == SweepMode::Zip) {
    for (std::size_t k = 0; k < axes[0].values.size(); ++k) emit(std::vector<std::size_t>(axes.size(), k));
    return points;
  }
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    emit(idx);
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) return points;
    }
  }
}

bool SweepTable::all_ok() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok(); });
}

namespace {

SweepRow run_point(const SweepPoint& p) {
  SweepRow row;
  row.index = p.index;
  row.labels = p.labels;
  try {
    if (!p.error.empty()) {
      row.error = p.error;
      return row;
    }
    row.metrics = run_scenario(p.spec).metrics;
    if (!row.metrics->converged) row.error = "no convergence";
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

SweepTable table_for(const SweepSpec& sweep) {
  SweepTable t;
  for (const SweepAxis& a : sweep.axes) t.axis_names.emplace_back(to_string(a.kind));
  t.nodes = sweep.base.network.node_count();
  return t;
}

}  // namespace

SweepTable run_sweep_serial(const SweepSpec& sweep, const SweepProgress& progress) {
  SweepTable t = table_for(sweep);
  for (const SweepPoint& p : sweep.expand()) {
    t.rows.push_back(run_point(p));
    if (progress) progress(t.rows.back());
  }
  return t;
}

SweepTable run_sweep(const SweepSpec& sweep, int jobs, const SweepProgress& progress) {
  SweepTable t = table_for(sweep);
  const std::vector<SweepPoint> points = sweep.expand();
  t.rows.resize(points.size());
  const int count = static_cast<int>(points.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  std::mutex report;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int k = 0; k < count; ++k) {
    t.rows[k] = run_point(points[k]);
    if (progress) {
      std::lock_guard lock(report);
      progress(t.rows[k]);
    }
  }
  return t;
}

std::vector<std::string> csv_header(const SweepTable& table) {
  std::vector<std::string> h{"row"};
  for (const auto& a : table.axis_names) h.push_back(a);
  for (const char* c : {"status", "error", "converged", "iterations", "profit_A", "profit_B", "total_demand",
                        "total_market_served", "total_rebalancing", "utilization_A", "utilization_B"})
    h.emplace_back(c);
  const std::size_t n = table.nodes;
  for (const char* p : {"A", "B"}) {
    for (const char* what : {"price", "rides", "rebalancing", "exit"})
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h.push_back(fmt::format("{}_{}_{}{}", what, p, i + 1, j + 1));
    for (const char* what : {"supply", "idle"})
      for (std::size_t i = 0; i < n; ++i) h.push_back(fmt::format("{}_{}_{}", what, p, i + 1));
  }
  return h;
}

namespace {

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

std::string to_csv(const SweepTable& table) {
  const std::vector<std::string> header = csv_header(table);
  std::ostringstream out;
  out << fmt::format("{}\n", fmt::join(header, ","));
  const std::size_t n = table.nodes;
  for (const SweepRow& row : table.rows) {
    std::vector<std::string> cells{fmt::format("{}", row.index)};
    for (const auto& l : row.labels) cells.push_back(csv_escape(l));
    cells.emplace_back(row.ok() ? "ok" : "failed");
    cells.push_back(csv_escape(row.error));
    if (const auto& m = row.metrics) {
      cells.push_back(m->converged ? "true" : "false");
      cells.push_back(fmt::format("{}", m->iterations));
      for (double v : {m->a.profit, m->b.profit, m->total_demand, m->total_market_served, m->total_rebalancing,
                       m->a.utilization, m->b.utilization})
        cells.push_back(fmt::format("{}", v));
      for (const PlayerMetrics* p : {&m->a, &m->b}) {
        for (const ArcMatrix* mat : {&p->prices, &p->rides, &p->rebalancing})
          for (double v : mat->values()) cells.push_back(fmt::format("{}", v));
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const bool exited = std::find(p->exit_arcs.begin(), p->exit_arcs.end(), ArcIndex{i, j}) !=
                                p->exit_arcs.end();
            cells.emplace_back(exited ? "1" : "0");
          }
        for (const NodeVector* v : {&p->supply, &p->idle})
          for (double x : *v) cells.push_back(fmt::format("{}", x));
      }
    }
    cells.resize(header.size());
    out << fmt::format("{}\n", fmt::join(cells, ","));
  }
  return out.str();
}

}  // namespace fleetgame
