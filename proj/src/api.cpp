#include "fleetgame/api.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>

#include <fmt/format.h>

#include "fleetgame/harness.hpp"
#include "fleetgame/io.hpp"
#include "fleetgame/potential.hpp"

// Last: <resolv.h> defines a `_res` macro that breaks Eigen.
#include <httplib.h>

namespace fleetgame::api {

namespace {

using Clock = std::chrono::steady_clock;

struct HttpError {
  int status;
  Json body;
};

Json error_body(std::string_view kind, std::string_view message) {
  return {{"error", kind}, {"message", message}};
}

HttpError bad_request(std::string_view message) { return {400, error_body("bad-request", message)}; }

Response reply(int status, const Json& body) {
  Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

Json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) throw bad_request("request body is empty");
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw bad_request(fmt::format("request body is not valid JSON: {}", e.what()));
  }
}

template <class T>
T query_number(const Request& req, const std::string& key, T fallback) {
  const auto it = req.query.find(key);
  if (it == req.query.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    if constexpr (std::is_integral_v<T>) {
      if (v != static_cast<double>(static_cast<long long>(v))) throw std::invalid_argument(key);
    }
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw HttpError{400, Json{{"error", "schema"},
                              {"message", fmt::format("query parameter '{}' must be a number", key)},
                              {"issues", {{{"path", "?" + key}, {"message", "must be a number"}}}}}};
  }
}

/// Maps library exceptions to HTTP errors; anything else is a 500.
HttpError classify(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const HttpError& e) {
    return e;
  } catch (const SchemaViolation& e) {
    Json issues = Json::array();
    for (const auto& i : e.issues()) issues.push_back({{"path", i.path}, {"message", i.message}});
    Json body = error_body("schema", e.what());
    body["issues"] = issues;
    return {400, body};
  } catch (const SolverError& e) {
    Json body = error_body("solver", e.what());
    body["diagnostics"] = {{"kkt", io::kkt_to_json(e.best().kkt)}, {"profit", e.best().profit}};
    return {500, body};
  } catch (const ValidationError& e) {
    Json body = error_body("semantic", e.what());
    if (!e.field().empty()) body["field"] = e.field();
    return {422, body};
  } catch (const UnsupportedError& e) {
    return {422, error_body("semantic", e.what())};
  } catch (const DomainError& e) {
    return {422, error_body("semantic", e.what())};
  } catch (const std::exception& e) {
    return {500, error_body("solver", e.what())};
  }
}

void cap_budget(ScenarioSpec& spec, double cap) {
  if (cap <= 0.0) return;
  if (spec.solver.time_budget_seconds <= 0.0 || spec.solver.time_budget_seconds > cap)
    spec.solver.time_budget_seconds = cap;
}

/// Inlines a standalone schema under components/schemas/<name>, rewriting its
/// local references so they resolve from the OpenAPI root.
Json rebase_refs(Json node, const std::string& base) {
  if (node.is_object()) {
    for (auto& [key, value] : node.items()) {
      if (key == "$ref" && value.is_string() && value.get<std::string>().rfind("#/", 0) == 0)
        value = base + value.get<std::string>().substr(1);
      else
        value = rebase_refs(std::move(value), base);
    }
  } else if (node.is_array()) {
    for (auto& v : node) v = rebase_refs(std::move(v), base);
  }
  return node;
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

struct Service::Cache {
  std::mutex lock;
  std::map<std::string, Json> solves;
  std::map<std::string, std::shared_ptr<const SweepTable>> sweeps;
};

Service::Service(ServiceOptions options) : options_(std::move(options)), cache_(std::make_unique<Cache>()) {}
Service::~Service() = default;

const Json& Service::openapi() {
  static const Json doc = [] {
    Json d = builtin_schema("openapi");
    for (const auto& [component, schema] : {std::pair{"Scenario", "scenario"}, std::pair{"Sweep", "sweep"},
                                            std::pair{"Result", "result"}}) {
      Json s = rebase_refs(builtin_schema(schema), std::string("#/components/schemas/") + component);
      s.erase("$schema");
      d["components"]["schemas"][component] = std::move(s);
    }
    return d;
  }();
  return doc;
}

Json Service::patterns() {
  const std::pair<DemandPattern, const char*> entries[] = {
      {DemandPattern::P1, "Trips into node 1 dominate for alpha > 0.5: D = S m [[a, 1-a], [a, 1-a]] / 2"},
      {DemandPattern::P2, "Trips from node 1 dominate for alpha > 0.5: D = S m [[a, a], [1-a, 1-a]] / 2"},
      {DemandPattern::P3, "Intra-node trips dominate for alpha > 0.5: D = S m [[a, 1-a], [1-a, a]] / 2"},
  };
  Json out = Json::array();
  for (const auto& [pattern, description] : entries) {
    const AlphaRange r = alpha_range(pattern);
    out.push_back({{"id", to_string(pattern)},
                   {"nodes", 2},
                   {"description", description},
                   {"alpha", {{"minimum", r.lo}, {"maximum", r.hi}}}});
  }
  return {{"patterns", out}};
}

Json Service::demand_functions() {
  static const Json catalog = [] {
    struct Entry {
      const char* id;
      const char* description;
    };
    const Entry entries[] = {
        {"bilinear", "(1 - p_own)(1 + p_other) / 2"},
        {"separable-linear:g=affine(0.5,-0.5),C=0.5", "g(p_own) + C p_other with affine g"},
        {"separable:g=quadratic(0.5,-0.25,-0.25),h=affine(0,0.5)", "g(p_own) + h(p_other), nonlinear g"},
        {"separable:g=affine(0.5,-0.5),h=power(0.5,2)", "g(p_own) + h(p_other), nonlinear h"},
        {"constant", "constant share; test double that violates the axioms"},
        {"own-increasing", "share rising in the own price; test double that violates the axioms"},
    };
    Json list = Json::array();
    for (const auto& e : entries) {
      const DemandFunction f = DemandFunction::parse(e.id);
      const PotentialDecision d = potential_admissible(f);
      Json item = {{"id", e.id},
                   {"description", e.description},
                   {"admissible", d.admissible},
                   {"reason", d.reason},
                   {"slope", d.slope ? Json(*d.slope) : Json(nullptr)}};
      if (d.witness)
        item["witness"] = {{"p_a", d.witness->p_a}, {"p_b", d.witness->p_b}, {"gap", d.witness->gap}};
      list.push_back(std::move(item));
    }
    Json templates = Json::array();
    for (const auto& t : DemandFunction::builtin_examples()) templates.push_back(t);
    return Json{{"demand_functions", list}, {"templates", templates}};
  }();
  return catalog;
}

Response Service::handle(const Request& req) const {
  Response res;
  try {
    if (req.method == "OPTIONS") {
      res.status = 204;
    } else if (req.path == "/api/v1/solve") {
      res = req.method == "POST" ? solve(req) : reply(405, error_body("bad-request", "use POST"));
    } else if (req.path == "/api/v1/sweep") {
      res = req.method == "POST" ? sweep(req) : reply(405, error_body("bad-request", "use POST"));
    } else if (req.path == "/api/v1/patterns" && req.method == "GET") {
      res = reply(200, patterns());
    } else if (req.path == "/api/v1/demand-functions" && req.method == "GET") {
      res = reply(200, demand_functions());
    } else if (req.path == "/api/v1/spec" && req.method == "GET") {
      res = reply(200, openapi());
    } else {
      res = reply(404, error_body("not-found", fmt::format("no route for {} {}", req.method, req.path)));
    }
  } catch (...) {
    const HttpError e = classify(std::current_exception());
    res = reply(e.status, e.body);
  }
  res.headers["Access-Control-Allow-Origin"] = options_.cors_origin;
  res.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
  res.headers["Access-Control-Allow-Headers"] = "Content-Type";
  return res;
}

Response Service::solve(const Request& req) const {
  const auto start = Clock::now();
  Json doc = parse_body(req.body);
  if (!doc.is_object()) throw bad_request("request body must be a JSON object");
  if (req.query.count("eps")) doc["solver"]["eps"] = query_number<double>(req, "eps", 0.0);
  if (req.query.count("max_iters")) doc["solver"]["max_iters"] = query_number<long long>(req, "max_iters", 0);
  const std::string hash = fnv1a_hex("solve\n" + doc.dump());

  Json result;
  bool cached = false;
  if (options_.cache) {
    std::lock_guard guard(cache_->lock);
    if (auto it = cache_->solves.find(hash); it != cache_->solves.end()) {
      result = it->second;
      cached = true;
    }
  }
  ScenarioSpec spec = io::scenario_from_json(doc);
  cap_budget(spec, options_.time_budget_seconds);
  if (!cached) {
    const ScenarioRun run = run_scenario(spec);
    result = io::result_to_json(run.result, run.metrics, spec);
    if (options_.cache) {
      std::lock_guard guard(cache_->lock);
      if (cache_->solves.size() >= options_.cache_capacity) cache_->solves.clear();
      cache_->solves.emplace(hash, result);
    }
  }
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  return reply(200, {{"request_hash", hash},
                     {"result", std::move(result)},
                     {"timing",
                      {{"generated_at", io::timestamp_now()},
                       {"wall_time_seconds", wall},
                       {"time_budget_seconds", spec.solver.time_budget_seconds},
                       {"cached", cached}}}});
}

Response Service::sweep(const Request& req) const {
  const Json doc = parse_body(req.body);
  if (!doc.is_object()) throw bad_request("request body must be a JSON object");
  io::Page page;
  page.page = query_number<std::size_t>(req, "page", 1);
  page.page_size = query_number<std::size_t>(req, "page_size", options_.default_page_size);
  if (page.page < 1) throw bad_request("page must be at least 1");
  if (page.page_size < 1 || page.page_size > options_.max_page_size)
    throw bad_request(fmt::format("page_size must lie in [1, {}]", options_.max_page_size));
  const std::string hash = fnv1a_hex("sweep\n" + doc.dump());

  std::shared_ptr<const SweepTable> table;
  if (options_.cache) {
    std::lock_guard guard(cache_->lock);
    if (auto it = cache_->sweeps.find(hash); it != cache_->sweeps.end()) table = it->second;
  }
  if (!table) {
    SweepSpec sweep = io::sweep_from_json(doc);
    cap_budget(sweep.base, options_.time_budget_seconds);
    table = std::make_shared<const SweepTable>(run_sweep(sweep, options_.sweep_jobs));
    if (options_.cache) {
      std::lock_guard guard(cache_->lock);
      if (cache_->sweeps.size() >= options_.cache_capacity) cache_->sweeps.clear();
      cache_->sweeps.emplace(hash, table);
    }
  }
  Json body = io::sweep_table_to_json(*table, page);
  body["request_hash"] = hash;
  return reply(200, body);
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>()) {
  auto forward = [&service](const httplib::Request& in, httplib::Response& out) {
    Request req{in.method, in.path, in.body, {}};
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    const Response res = service.handle(req);
    out.status = res.status;
    for (const auto& [k, v] : res.headers) out.set_header(k, v);
    if (res.status != 204) out.set_content(res.body, res.content_type);
  };
  impl_->server.Get(".*", forward);
  impl_->server.Post(".*", forward);
  impl_->server.Options(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(fmt::format("cannot listen on {}:{}", host, port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void serve(const Service& service, const std::string& host, int port) {
  HttpServer server(service);
  server.bind(host, port);
  server.run();
}

}  // namespace fleetgame::api
