#pragma once

// HTTP front end over a Service, and the serve entry point with exit codes.
// Needs the vendored cpp-httplib on the include path.
//
//   GET /games                          -> pulse.games
//   GET /games/{id}/timeline?from=&to=  -> pulse.timeline (404 unknown game, 400 bad range)
//   GET /events?since=<id>              -> pulse.events

#include <atomic>
#include <chrono>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>

#include "pulse/service.hpp"

namespace pulse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSource = 3;

class HttpFrontend {
 public:
  /// `listen` is "host:port"; port 0 binds any free port. Throws ConfigError.
  HttpFrontend(const Service& service, const std::string& listen) : service_(service) {
    auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw ConfigError("listen address must be host:port, got '" + listen + "'");
    host_ = listen.substr(0, colon);
    auto port = parse_second(listen.substr(colon + 1));
    if (!port || *port < 0 || *port > 65535) throw ConfigError("bad port in listen address '" + listen + "'");
    routes();
    port_ = *port == 0 ? server_.bind_to_any_port(host_) : (server_.bind_to_port(host_, static_cast<int>(*port))
                                                                ? static_cast<int>(*port)
                                                                : -1);
    if (port_ < 0) throw ConfigError("cannot listen on " + listen);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  ~HttpFrontend() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const noexcept { return port_; }
  const std::string& host() const noexcept { return host_; }

 private:
  static void send(httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  }

  static std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
  }

  void routes() {
    server_.Get("/games", [this](const httplib::Request&, httplib::Response& res) { send(res, service_.games_reply()); });
    server_.Get(R"(/games/([^/]+)/timeline)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.timeline_reply(req.matches[1], param(req, "from"), param(req, "to")));
    });
    server_.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.events_reply(param(req, "since")));
    });
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) res.set_content(nlohmann::json{{"error", "not found"}}.dump(), "application/json");
    });
  }

  const Service& service_;
  httplib::Server server_;
  std::string host_;
  int port_ = -1;
  std::thread thread_;
};

/// Runs the service until the source ends, then keeps serving HTTP (if
/// enabled) until `stop` is set. Returns an exit code; `stop` may be null.
inline int run_service(const ServiceConfig& cfg, const std::atomic<bool>* stop, std::ostream& log = std::cerr) {
  std::unique_ptr<Service> service;
  std::unique_ptr<HttpFrontend> http;
  try {
    service = std::make_unique<Service>(cfg);
    if (!cfg.listen.empty()) {
      http = std::make_unique<HttpFrontend>(*service, cfg.listen);
      log << "pulse: listening on " << http->host() << ':' << http->port() << '\n';
    }
  } catch (const ConfigError& e) {
    log << "pulse: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SourceError& e) {
    log << "pulse: source failure: " << e.what() << '\n';
    return kExitSource;
  }
  service->start();
  std::thread watcher([&] {
    while (!service->finished() && !(stop && stop->load())) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (stop && stop->load()) service->request_stop();
  });
  int code = kExitOk;
  try {
    service->wait();
  } catch (const SourceError& e) {
    log << "pulse: source failure after retries: " << e.what() << '\n';
    code = kExitSource;
  } catch (const std::exception& e) {
    log << "pulse: ingestion failed: " << e.what() << '\n';
    code = kExitSource;
  }
  watcher.join();
  log << "pulse: stream ended, " << service->events().size() << " events\n";
  if (http && code == kExitOk)
    while (!(stop && stop->load())) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  return code;
}

}  // namespace pulse
