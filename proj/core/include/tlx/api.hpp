#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "tlx/store.hpp"

namespace tlx {

/// Every error response carries exactly one of these.
struct ApiError : std::runtime_error {
  ApiError(int status, std::string code_, const std::string& message)
      : std::runtime_error(message), http_status(status), code(std::move(code_)) {}

  int http_status;
  std::string code;
};

struct ApiRequest {
  std::string method;  // "GET", "POST"
  std::string path;    // "/api/experiments/abc/export"
  std::map<std::string, std::string> query;
  std::string authorization;  // raw Authorization header value
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::optional<std::string> attachment_filename;
};

struct ApiConfig {
  std::string admin_token;  // required
};

/// Transport-independent JSON API: routing, authentication and error mapping
/// over an ExperimentStore. Safe to call from many threads.
class ApiService {
 public:
  ApiService(ExperimentStore& store, ApiConfig config);

  ApiResponse handle(const ApiRequest& request) const;

 private:
  ApiResponse dispatch(const ApiRequest& request) const;
  void require_admin(const ApiRequest& request) const;
  void require_participant(const ApiRequest& request, const std::string& participant_id) const;

  ExperimentStore& store_;
  ApiConfig config_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end: /api/* goes to ApiService, everything else is static UI.
class HttpServer {
 public:
  HttpServer(const ApiService& api, ServerConfig config);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket and returns the bound port. Throws std::runtime_error.
  int bind();
  /// Serves until stop(); call after bind().
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tlx
