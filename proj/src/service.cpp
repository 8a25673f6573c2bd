#include "recallm/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include "recallm/error.hpp"

namespace recallm {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, std::string_view detail) {
  send(res, status, json{{"error", kind}, {"detail", detail}});
}

// Parses the body as a JSON object or answers 400 and returns null.
std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  json doc;
  try {
    doc = json::parse(req.body);
  } catch (const json::parse_error& e) {
    send_error(res, 400, "malformed_json", e.what());
    return std::nullopt;
  }
  if (!doc.is_object()) {
    send_error(res, 400, "bad_request", "request body must be a JSON object");
    return std::nullopt;
  }
  return doc;
}

std::optional<std::string> string_field(const json& doc, const char* name, httplib::Response& res,
                                        bool required = true) {
  auto it = doc.find(name);
  if (it == doc.end()) {
    if (required) send_error(res, 400, "bad_request", std::string("missing field '") + name + "'");
    return std::nullopt;
  }
  if (!it->is_string()) {
    send_error(res, 400, "bad_request", std::string("field '") + name + "' must be a string");
    return std::nullopt;
  }
  return it->get<std::string>();
}

// Runs op and maps library exceptions to status codes.
template <typename Op>
void guarded(httplib::Response& res, Op&& op) {
  try {
    op();
  } catch (const ArgumentError& e) {
    send_error(res, 400, "bad_request", e.what());
  } catch (const ProviderTimeout& e) {
    send_error(res, 504, "provider_timeout", e.what());
  } catch (const ProviderError& e) {
    send_error(res, 502, "provider_error", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

Service::Service(MemoryEngine& engine) : engine_(engine), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;

  s.Post("/ingest", [this](const httplib::Request& req, httplib::Response& res) {
    auto doc = parse_body(req, res);
    if (!doc) return;
    auto text = string_field(*doc, "text", res);
    if (!text) return;
    guarded(res, [&] { send(res, 200, json(engine_.ingest(*text))); });
  });

  s.Post("/ask", [this](const httplib::Request& req, httplib::Response& res) {
    auto doc = parse_body(req, res);
    if (!doc) return;
    auto question = string_field(*doc, "question", res);
    if (!question) return;
    std::string mode_name = "graph";
    if (doc->contains("mode")) {
      auto mode = string_field(*doc, "mode", res);
      if (!mode) return;
      mode_name = *mode;
    }
    guarded(res, [&] { send(res, 200, engine_.ask(*question, parse_ask_mode(mode_name))); });
  });

  s.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, json(engine_.stats())); });
  });

  s.Get("/graph/export", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { res.set_content(engine_.export_graph(), "application/json"); });
  });

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_error(res, res.status, res.status == 404 ? "not_found" : "http_error", "");
  });
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

bool Service::run() { return server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

bool Service::running() const { return server_->is_running(); }

}  // namespace recallm
