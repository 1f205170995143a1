#include "fleetgame/io.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace fleetgame::io {

namespace {

Json matrix_json(const ArcMatrix& m) { return m.rows(); }

Json arc_list(const std::vector<ArcIndex>& arcs) {
  Json out = Json::array();
  for (const auto& a : arcs) out.push_back({{"from", a.i + 1}, {"to", a.j + 1}});
  return out;
}

ArcMatrix matrix_from(const Json& v, std::size_t n, const std::string& field) {
  if (v.is_number()) return ArcMatrix(n, v.get<double>());
  if (v.size() != n)
    throw ValidationError(fmt::format("{} must have {} rows (got {})", field, n, v.size()), field);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i].size() != n)
      throw ValidationError(fmt::format("{} row {} must have {} entries (got {})", field, i + 1, n, v[i].size()),
                            field);
    rows.push_back(v[i].get<std::vector<double>>());
  }
  return ArcMatrix::from_rows(rows);
}

NodeVector vector_from(const Json& v, std::size_t n, const std::string& field) {
  if (v.is_number()) return NodeVector(n, v.get<double>());
  if (v.size() != n) throw ValidationError(fmt::format("{} must have {} entries (got {})", field, n, v.size()), field);
  return v.get<NodeVector>();
}

std::size_t infer_nodes(const Json& doc) {
  if (doc.contains("network")) {
    const Json& net = doc["network"];
    if (net.contains("node_count")) return net["node_count"].get<std::size_t>();
    for (const char* key : {"transit_cost", "rebalancing_penalty", "parking_cost"})
      if (net.contains(key) && net[key].is_array()) return net[key].size();
  }
  if (doc.contains("demand_matrix")) return doc["demand_matrix"].size();
  return 2;
}

std::vector<SchemaIssue> prefixed(const std::vector<SchemaIssue>& issues, const std::string& prefix) {
  std::vector<SchemaIssue> out;
  for (const auto& i : issues) out.push_back({prefix + i.path, i.message});
  return out;
}

ScenarioSpec build_scenario(const Json& doc) {
  ScenarioSpec spec;
  spec.name = doc.value("name", spec.name);
  spec.supply_total = doc.at("supply_total").get<double>();
  spec.demand_multiplier = doc.value("demand_multiplier", spec.demand_multiplier);
  spec.fleet_fraction = doc.at("fleet_fraction").get<double>();
  spec.pattern = parse_pattern(doc.at("pattern").get<std::string>());
  spec.alpha = doc.value("alpha", spec.alpha);

  const std::size_t n = infer_nodes(doc);
  if (doc.contains("demand_matrix")) spec.demand_matrix = matrix_from(doc["demand_matrix"], n, "demand_matrix");
  const Json net = doc.value("network", Json::object());
  spec.network = NetworkModel(matrix_from(net.value("transit_cost", Json(0.1)), n, "network/transit_cost"),
                              matrix_from(net.value("rebalancing_penalty", Json(0.0)), n, "network/rebalancing_penalty"),
                              vector_from(net.value("parking_cost", Json(0.0)), n, "network/parking_cost"));
  spec.demand_function = doc.value("demand_function", spec.demand_function);
  if (doc.contains("mode")) spec.mode = parse_mode(doc["mode"].get<std::string>());

  const Json solver = doc.value("solver", Json::object());
  SolverConfig& cfg = spec.solver;
  cfg.eps = solver.value("eps", cfg.eps);
  cfg.max_iters = solver.value("max_iters", cfg.max_iters);
  cfg.init_price = solver.value("init_price", cfg.init_price);
  if (solver.contains("order")) cfg.order = parse_order(solver["order"].get<std::string>());
  cfg.multistart = solver.value("multistart", cfg.multistart);
  cfg.seed = solver.value("seed", cfg.seed);
  cfg.time_budget_seconds = solver.value("time_budget_seconds", cfg.time_budget_seconds);
  return spec;
}

AxisValue axis_value(SweepAxisKind kind, const Json& v, std::size_t nodes, const std::string& path) {
  auto wrong = [&](const char* expected) {
    return SchemaViolation({{path, fmt::format("expected {} for axis '{}'", expected, to_string(kind))}});
  };
  switch (kind) {
    case SweepAxisKind::DemandMultiplier:
    case SweepAxisKind::Alpha:
    case SweepAxisKind::FleetFraction:
      if (!v.is_number()) throw wrong("a number");
      return v.get<double>();
    case SweepAxisKind::Pattern:
      if (!v.is_string()) throw wrong("a pattern name");
      return parse_pattern(v.get<std::string>());
    case SweepAxisKind::Parking:
      if (!v.is_number() && !(v.is_array() && std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); })))
        throw wrong("a number or a per-node vector");
      return vector_from(v, nodes, path);
    case SweepAxisKind::Penalty:
      if (!v.is_number() && !v.is_array()) throw wrong("a number or a matrix");
      return matrix_from(v, nodes, path);
  }
  throw wrong("a value");
}

Json player_json(const Strategy& s, double profit, const KktDiagnostics& kkt, const PlayerMetrics& m) {
  Json j = strategy_to_json(s);
  j["profit"] = profit;
  j["utilization"] = m.utilization;
  j["exit_arcs"] = arc_list(m.exit_arcs);
  j["kkt"] = kkt_to_json(kkt);
  return j;
}

}  // namespace

Json load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path.string()), "file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ValidationError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()), "file");
  }
}

ScenarioSpec scenario_from_json(const Json& doc) {
  require_schema(doc, "scenario");
  ScenarioSpec spec = build_scenario(doc);
  spec.validate();
  return spec;
}

Json scenario_to_json(const ScenarioSpec& spec) {
  Json j = {
      {"schema_version", kSchemaVersion},
      {"name", spec.name},
      {"supply_total", spec.supply_total},
      {"demand_multiplier", spec.demand_multiplier},
      {"fleet_fraction", spec.fleet_fraction},
      {"pattern", to_string(spec.pattern)},
      {"alpha", spec.alpha},
      {"network",
       {{"node_count", spec.network.node_count()},
        {"transit_cost", matrix_json(spec.network.transit_cost_base())},
        {"rebalancing_penalty", matrix_json(spec.network.rebalancing_penalty())},
        {"parking_cost", spec.network.parking_cost()}}},
      {"demand_function", spec.demand_function},
      {"mode", to_string(spec.mode)},
      {"solver",
       {{"eps", spec.solver.eps},
        {"max_iters", spec.solver.max_iters},
        {"init_price", spec.solver.init_price},
        {"order", to_string(spec.solver.order)},
        {"multistart", spec.solver.multistart},
        {"seed", spec.solver.seed},
        {"time_budget_seconds", spec.solver.time_budget_seconds}}},
  };
  if (spec.demand_matrix) j["demand_matrix"] = matrix_json(*spec.demand_matrix);
  return j;
}

SweepSpec sweep_from_json(const Json& doc) {
  require_schema(doc, "sweep");
  const Json& base = doc["base"];
  if (auto issues = validate_schema(base, builtin_schema("scenario")); !issues.empty())
    throw SchemaViolation(prefixed(issues, "/base"));

  SweepSpec sweep;
  sweep.base = build_scenario(base);
  if (doc.contains("name")) sweep.base.name = doc["name"].get<std::string>();
  sweep.mode = doc.value("mode", std::string("cross")) == "zip" ? SweepMode::Zip : SweepMode::Cross;
  const std::size_t n = sweep.base.network.node_count();
  const Json& axes = doc["axes"];
  for (std::size_t a = 0; a < axes.size(); ++a) {
    SweepAxis axis;
    axis.kind = parse_axis(axes[a]["name"].get<std::string>());
    const Json& values = axes[a]["values"];
    for (std::size_t k = 0; k < values.size(); ++k)
      axis.values.push_back(axis_value(axis.kind, values[k], n, fmt::format("/axes/{}/values/{}", a, k)));
    sweep.axes.push_back(std::move(axis));
  }
  sweep.validate();
  return sweep;
}

Json strategy_to_json(const Strategy& s) {
  return {{"fleet", s.fleet},
          {"prices", matrix_json(s.prices)},
          {"rides", matrix_json(s.rides)},
          {"rebalancing", matrix_json(s.rebalancing)},
          {"supply", s.supply},
          {"idle", s.idle}};
}

Json kkt_to_json(const KktDiagnostics& k) {
  return {{"stationarity_residual", k.stationarity_residual},
          {"complementarity_residual", k.complementarity_residual},
          {"feasibility_residual", k.feasibility_residual},
          {"min_multiplier", k.min_multiplier},
          {"supply", k.supply},
          {"rebalancing", k.rebalancing.size() ? matrix_json(k.rebalancing) : Json::array()},
          {"price_lower", k.price_lower.size() ? matrix_json(k.price_lower) : Json::array()},
          {"price_upper", k.price_upper.size() ? matrix_json(k.price_upper) : Json::array()},
          {"flow", k.flow},
          {"fleet", k.fleet},
          {"regularization_cost", k.regularization_cost},
          {"iterations", k.iterations},
          {"non_convex", k.non_convex},
          {"gradient_source", k.gradient_source}};
}

Json metrics_to_json(const RunMetrics& m) {
  auto player = [](const PlayerMetrics& p) {
    return Json{{"fleet", p.fleet},
                {"profit", p.profit},
                {"prices", matrix_json(p.prices)},
                {"rides", matrix_json(p.rides)},
                {"rebalancing", matrix_json(p.rebalancing)},
                {"supply", p.supply},
                {"idle", p.idle},
                {"utilization", p.utilization},
                {"exit_arcs", arc_list(p.exit_arcs)}};
  };
  return {{"name", m.name},
          {"mode", to_string(m.mode)},
          {"converged", m.converged},
          {"iterations", m.iterations},
          {"demand", matrix_json(m.demand)},
          {"total_demand", m.total_demand},
          {"total_market_served", m.total_market_served},
          {"total_rebalancing", m.total_rebalancing},
          {"players", {{"A", player(m.a)}, {"B", player(m.b)}}}};
}

Json result_to_json(const EquilibriumResult& r, const RunMetrics& metrics, const ScenarioSpec& spec) {
  Json trace = Json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"iteration", t.iteration},
                     {"prices", {{"A", matrix_json(t.prices_a)}, {"B", matrix_json(t.prices_b)}}},
                     {"profits", {{"A", t.profit_a}, {"B", t.profit_b}}},
                     {"residuals", {{"A", t.residual_a}, {"B", t.residual_b}}}});
  Json verification = nullptr;
  if (r.verification)
    verification = {{"gain", {{"A", r.verification->gain_a}, {"B", r.verification->gain_b}}},
                    {"tolerance", {{"A", r.verification->tolerance_a}, {"B", r.verification->tolerance_b}}},
                    {"certified", r.verification->certified}};
  return {{"schema_version", kSchemaVersion},
          {"generated_at", timestamp_now()},
          {"scenario", scenario_to_json(spec)},
          {"method", to_string(r.method)},
          {"mode", to_string(r.mode)},
          {"converged", r.converged},
          {"oscillating", r.oscillating},
          {"timed_out", r.timed_out},
          {"iterations", r.iterations},
          {"residuals", {{"A", r.residual_a}, {"B", r.residual_b}}},
          {"players",
           {{"A", player_json(r.a, r.profit_a, r.kkt_a, metrics.a)},
            {"B", player_json(r.b, r.profit_b, r.kkt_b, metrics.b)}}},
          {"metrics", metrics_to_json(metrics)},
          {"verification", verification},
          {"trace", trace},
          {"warnings", r.warnings}};
}

Json sweep_table_to_json(const SweepTable& table, const Page& page) {
  const std::size_t total = table.rows.size();
  std::size_t begin = 0, end = total;
  if (page.page_size > 0) {
    if (page.page < 1) throw ValidationError("page numbers start at 1", "page");
    begin = std::min(total, (page.page - 1) * page.page_size);
    end = std::min(total, begin + page.page_size);
  }
  Json rows = Json::array();
  for (std::size_t k = begin; k < end; ++k) {
    const SweepRow& row = table.rows[k];
    rows.push_back({{"index", row.index},
                    {"labels", row.labels},
                    {"status", row.error.empty() ? (row.ok() ? "ok" : "not-converged") : "error"},
                    {"error", row.error.empty() ? Json(nullptr) : Json(row.error)},
                    {"metrics", row.metrics ? metrics_to_json(*row.metrics) : Json(nullptr)}});
  }
  const std::size_t size = page.page_size > 0 ? page.page_size : std::max<std::size_t>(total, 1);
  return {{"schema_version", kSchemaVersion},
          {"axes", table.axis_names},
          {"nodes", table.nodes},
          {"total_rows", total},
          {"page", page.page_size > 0 ? page.page : 1},
          {"page_size", size},
          {"page_count", total == 0 ? 1 : (total + size - 1) / size},
          {"rows", rows}};
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace fleetgame::io
