#pragma once

#include <filesystem>
#include <string>

#include "httplib.h"
#include "qualprob/session.hpp"

namespace qualprob {

/// HTTP status for a domain error raised while serving a request.
inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownAtom:
    case ErrorCode::InvalidSpace:
    case ErrorCode::SpaceMismatch:
    case ErrorCode::DuplicateId: return 400;
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownJudgment: return 404;
    case ErrorCode::InconsistentSession:
    case ErrorCode::EmptyCredalSet: return 409;
    case ErrorCode::CapExceeded:
    case ErrorCode::SizeCapExceeded:
    case ErrorCode::ZeroProbabilityConditioner: return 422;
    case ErrorCode::BudgetExceeded: return 503;
    default: return 500;
  }
}

/// Routes the v1 wire protocol onto a SessionService.
class HttpFrontEnd {
 public:
  explicit HttpFrontEnd(SessionService& service, const std::filesystem::path& static_dir = {})
      : service_(service) {
    routes();
    if (!static_dir.empty() && !server_.set_mount_point("/", static_dir.string())) {
      throw Error(ErrorCode::Io, "static directory '" + static_dir.string() + "' does not exist");
    }
  }

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  /// Binds an ephemeral port and returns it; pair with run().
  int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
  bool run() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn, int ok_status = 200) {
    return [fn, ok_status](const httplib::Request& req, httplib::Response& res) {
      Json body;
      int status = ok_status;
      try {
        body = fn(req);
      } catch (const Error& e) {
        status = http_status(e.code());
        body = report::error(e);
      } catch (const Json::exception& e) {
        status = 400;
        body = Json{{"error", "bad_request"}, {"message", e.what()}};
      } catch (const std::exception& e) {
        status = 500;
        body = Json{{"error", "internal"}, {"message", e.what()}};
      }
      body["schema"] = kSchemaVersion;
      res.status = status;
      res.set_content(body.dump(), "application/json");
    };
  }

  static std::string field(const Json& body, const char* name) {
    if (!body.contains(name) || !body[name].is_string()) {
      throw Error(ErrorCode::SyntaxError, std::string("request body needs string field '") + name + "'");
    }
    return body[name].get<std::string>();
  }

  static std::string param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) throw Error(ErrorCode::SyntaxError, std::string("missing query parameter '") + name + "'");
    return req.get_param_value(name);
  }

  void routes() {
    const std::string id = "/v1/sessions/([0-9a-f]+)";
    server_.Post("/v1/sessions", guarded([this](const httplib::Request& req) {
                   return service_.create(field(Json::parse(req.body), "space"));
                 }, 201));
    server_.Post(id + "/judgments", guarded([this](const httplib::Request& req) {
                   auto body = Json::parse(req.body);
                   return service_.assert_judgment(req.matches[1], field(body, "lhs"), field(body, "rel"),
                                                   field(body, "rhs"));
                 }));
    server_.Delete(id + "/judgments/([A-Za-z0-9_.]+)", guarded([this](const httplib::Request& req) {
                     return service_.retract(req.matches[1], req.matches[2]);
                   }));
    server_.Get(id + "/status", guarded([this](const httplib::Request& req) { return service_.status(req.matches[1]); }));
    server_.Get(id + "/report", guarded([this](const httplib::Request& req) { return service_.report(req.matches[1]); }));
    server_.Get(id + "/realization",
                guarded([this](const httplib::Request& req) { return service_.realization(req.matches[1]); }));
    server_.Get(id + "/entails", guarded([this](const httplib::Request& req) {
                  return service_.entails(req.matches[1], param(req, "lhs"), param(req, "rhs"));
                }));
    server_.Get(id + "/bounds", guarded([this](const httplib::Request& req) {
                  std::optional<std::string> given;
                  if (req.has_param("given")) given = req.get_param_value("given");
                  return service_.bounds(req.matches[1], param(req, "event"),
                                         given ? std::optional<std::string_view>(*given) : std::nullopt);
                }));
  }

  SessionService& service_;
  httplib::Server server_;
};

}  // namespace qualprob
