#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "fleetgame/schema.hpp"

namespace fleetgame::api {

struct Request {
  std::string method;  // "GET", "POST", "OPTIONS"
  std::string path;
  std::string body;
  std::map<std::string, std::string> query;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;

  Json json() const { return Json::parse(body); }
};

struct ServiceOptions {
  /// Cap on each solve and on each sweep row; also the default when the
  /// request sets no budget of its own.
  double time_budget_seconds = 30.0;
  std::size_t default_page_size = 100;
  std::size_t max_page_size = 1000;
  /// Threads per sweep request (0 = OpenMP default).
  int sweep_jobs = 1;
  bool cache = true;
  std::size_t cache_capacity = 128;
  std::string cors_origin = "*";
};

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

/// Transport-independent request handler. Thread-safe; the only shared state
/// is the optional result cache.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const Request& request) const;

  /// The OpenAPI document with the scenario, sweep and result schemas inlined.
  static const Json& openapi();
  static Json patterns();
  static Json demand_functions();

  const ServiceOptions& options() const noexcept { return options_; }

 private:
  Response solve(const Request& request) const;
  Response sweep(const Request& request) const;

  struct Cache;
  ServiceOptions options_;
  std::unique_ptr<Cache> cache_;
};

/// HTTP transport for a Service. `bind` then `run` (blocking) from one
/// thread; `stop` may be called from any other.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Returns the bound port; pass port 0 for any free port. Throws Error.
  int bind(const std::string& host, int port);
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks serving `service` over HTTP until the process is stopped.
/// Throws Error when the address cannot be bound.
void serve(const Service& service, const std::string& host, int port);

}  // namespace fleetgame::api
