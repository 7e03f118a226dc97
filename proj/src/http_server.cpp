#include "pcii/http_server.hpp"

#include "httplib.h"
#include "pcii/error.hpp"

namespace pcii {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession: return 404;
    case ErrorCode::IncompleteSession: return 409;
    default: return 400;
  }
}

struct HttpServer::Impl {
  ElicitationService& service;
  httplib::Server server;

  explicit Impl(ElicitationService& s) : service(s) { routes(); }

  static void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static json parse_body(const httplib::Request& req) {
    try {
      return json::parse(req.body);
    } catch (const json::exception&) {
      throw Error(ErrorCode::ParseError, "request body is not valid JSON");
    }
  }

  template <class F>
  static httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_json(res, {{"error", to_string(e.code())}, {"message", e.what()}},
                  http_status(e.code()));
      } catch (const json::exception& e) {
        send_json(res, {{"error", "ParseError"}, {"message", e.what()}}, 400);
      } catch (const std::exception& e) {
        send_json(res, {{"error", "InternalError"}, {"message", e.what()}}, 500);
      }
    };
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const auto entities = body.at("entities").get<std::vector<std::string>>();
      const auto indicator = IndicatorId::parse(body.value("indicator", std::string("kii")));
      send_json(res, session_to_json(service.create_session(entities, indicator)), 201);
    }));

    server.Get(R"(/sessions/([0-9a-f]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, session_to_json(service.get_session(req.matches[1])));
               }));

    server.Put(R"(/sessions/([0-9a-f]+)/comparisons)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const json body = parse_body(req);
                 const double ratio = parse_wire_number(body.at("ratio"));
                 const auto report = service.submit_comparison(
                     id, body.at("i").get<std::string>(), body.at("j").get<std::string>(), ratio);
                 send_json(res, report_json(report, service.get_session(id)));
               }));

    server.Get(R"(/sessions/([0-9a-f]+)/report)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 send_json(res, report_json(service.get_report(id), service.get_session(id)));
               }));

    server.Get(R"(/sessions/([0-9a-f]+)/export)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string format =
                     req.has_param("format") ? req.get_param_value("format") : "csv";
                 if (format != "csv" && format != "json") {
                   throw Error(ErrorCode::ParseError, "format must be csv or json");
                 }
                 const bool csv = format == "csv";
                 res.set_content(service.export_matrix(req.matches[1],
                                                       csv ? ExportFormat::Csv : ExportFormat::Json),
                                 csv ? "text/csv" : "application/json");
               }));

    server.Delete(R"(/sessions/([0-9a-f]+))",
                  guarded([this](const httplib::Request& req, httplib::Response& res) {
                    service.delete_session(req.matches[1]);
                    res.status = 204;
                  }));
  }
};

HttpServer::HttpServer(ElicitationService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}
bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }
void HttpServer::stop() { impl_->server.stop(); }

}  // namespace pcii
