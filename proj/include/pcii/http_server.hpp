#pragma once

// JSON-over-HTTP front end for ElicitationService.
//
//   POST   /sessions                  {"entities": [...], "indicator": "kii"}  -> 201 session
//   GET    /sessions/{id}                                                      -> session
//   PUT    /sessions/{id}/comparisons {"i": label, "j": label, "ratio": "3"}   -> report
//   GET    /sessions/{id}/report                                               -> report
//   GET    /sessions/{id}/export?format=csv|json                               -> matrix file
//   DELETE /sessions/{id}                                                      -> 204
//
// Errors come back as {"error": <code>, "message": <text>} with status 404
// (unknown session), 409 (export of an incomplete session) or 400.

#include <memory>
#include <string>

#include "pcii/error.hpp"
#include "pcii/service.hpp"

namespace pcii {

class HttpServer {
 public:
  explicit HttpServer(ElicitationService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and serves until stop(). Returns false if the port cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it (or -1); serve with listen_after_bind.
  int bind_to_any_port(const std::string& host);
  /// Binds `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for a library error code.
int http_status(ErrorCode code);

}  // namespace pcii
