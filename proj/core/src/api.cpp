#include "tlx/api.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <string_view>
#include <vector>

#include "tlx/ids.hpp"
#include "tlx/json_codec.hpp"
#include "tlx/report.hpp"

namespace tlx {

namespace {

constexpr std::string_view kFallbackIndex =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>NASA-TLX</title></head>"
    "<body><p>The NASA-TLX service is running. No UI assets are installed; "
    "start the server with --static-dir to serve them.</p></body></html>\n";

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto end = std::min(path.find('/', start), path.size());
    if (end > start) parts.emplace_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

ApiResponse json_response(const Json& body, int status = 200) {
  return {status, "application/json", body.dump(), std::nullopt};
}

ApiResponse error_response(const ApiError& e) {
  return json_response({{"error", {{"code", e.code}, {"message", e.what()}}}}, e.http_status);
}

int status_for(StoreErrc errc) {
  switch (errc) {
    case StoreErrc::UnknownExperiment:
    case StoreErrc::UnknownParticipant:
    case StoreErrc::UnknownJoinCode: return 404;
    case StoreErrc::ExperimentClosed: return 410;
    case StoreErrc::WrongState:
    case StoreErrc::ConflictingResubmission: return 409;
    case StoreErrc::InvalidName: return 400;
    case StoreErrc::StorageFailure: return 500;
  }
  return 500;
}

std::string bearer_token(const std::string& header) {
  constexpr std::string_view scheme = "bearer ";
  if (header.size() <= scheme.size()) return {};
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(header[i])) != scheme[i]) return {};
  }
  auto token = header.substr(scheme.size());
  token.erase(0, token.find_first_not_of(' '));
  return token;
}

nlohmann::json parse_body(const std::string& body) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw ApiError(400, "invalid_json", "request body is not valid JSON");
  if (!doc.is_object()) throw ApiError(400, "invalid_body", "request body must be a JSON object");
  return doc;
}

const nlohmann::json& body_field(const nlohmann::json& doc, const char* name) {
  if (!doc.contains(name)) {
    throw ApiError(400, "invalid_body", std::string("missing field '") + name + "'");
  }
  return doc.at(name);
}

[[noreturn]] void not_found() { throw ApiError(404, "not_found", "no such route"); }
[[noreturn]] void method_not_allowed() {
  throw ApiError(405, "method_not_allowed", "method not allowed for this route");
}

}  // namespace

ApiService::ApiService(ExperimentStore& store, ApiConfig config)
    : store_(store), config_(std::move(config)) {
  if (config_.admin_token.empty()) throw std::invalid_argument("an admin token is required");
}

void ApiService::require_admin(const ApiRequest& request) const {
  if (!constant_time_equal(bearer_token(request.authorization), config_.admin_token)) {
    throw ApiError(401, "unauthorized", "missing or invalid admin credential");
  }
}

void ApiService::require_participant(const ApiRequest& request, const std::string& participant_id) const {
  store_.get_participant(participant_id);  // 404 for unknown ids
  if (!store_.verify_session(participant_id, bearer_token(request.authorization))) {
    throw ApiError(401, "unauthorized", "missing or invalid session token");
  }
}

ApiResponse ApiService::handle(const ApiRequest& request) const {
  try {
    return dispatch(request);
  } catch (const ApiError& e) {
    return error_response(e);
  } catch (const ScoringError& e) {
    return error_response(ApiError(400, std::string(error_code(e.errc())), e.what()));
  } catch (const CodecError& e) {
    return error_response(ApiError(400, "invalid_body", e.what()));
  } catch (const StoreError& e) {
    return error_response(ApiError(status_for(e.errc()), std::string(error_code(e.errc())), e.what()));
  } catch (const nlohmann::json::exception& e) {
    return error_response(ApiError(400, "invalid_body", e.what()));
  } catch (const std::exception& e) {
    return error_response(ApiError(500, "internal_error", e.what()));
  }
}

ApiResponse ApiService::dispatch(const ApiRequest& request) const {
  const auto parts = split_path(request.path);
  const bool get = request.method == "GET";
  const bool post = request.method == "POST";
  if (parts.size() < 2 || parts[0] != "api") not_found();

  const std::string& resource = parts[1];

  if (resource == "experiments") {
    require_admin(request);
    if (parts.size() == 2) {
      if (post) {
        const auto doc = parse_body(request.body);
        const auto& name = body_field(doc, "name");
        if (!name.is_string()) throw ApiError(400, "invalid_name", "name must be a string");
        return json_response(experiment_json(store_.create_experiment(name.get<std::string>())), 201);
      }
      if (!get) method_not_allowed();
      Json list = Json::array();
      for (const auto& e : store_.list_experiments()) list.push_back(experiment_json(e));
      return json_response(list);
    }

    const std::string& id = parts[2];
    if (parts.size() == 3) {
      if (!get) method_not_allowed();
      return json_response(experiment_json(store_.get_experiment(id)));
    }
    if (parts.size() != 4) not_found();
    const std::string& action = parts[3];

    if (action == "close") {
      if (!post) method_not_allowed();
      return json_response(experiment_json(store_.close_experiment(id)));
    }
    if (!get) {
      if (action == "participants" || action == "results" || action == "summary" || action == "export") {
        method_not_allowed();
      }
      not_found();
    }
    if (action == "participants") {
      Json list = Json::array();
      for (const auto& p : store_.list_participants(id)) list.push_back(participant_json(p));
      return json_response(list);
    }
    if (action == "results") {
      Json list = Json::array();
      for (const auto& r : store_.list_results(id)) list.push_back(stored_result_json(r));
      return json_response(list);
    }
    if (action == "summary") {
      return json_response(summary_json(summarize(store_.list_results(id))));
    }
    if (action == "export") {
      const auto it = request.query.find("format");
      const std::string format = it == request.query.end() ? "" : it->second;
      if (format != "csv" && format != "json") {
        throw ApiError(400, "invalid_format", "format must be csv or json");
      }
      const auto experiment = store_.get_experiment(id);
      const auto results = store_.list_results(id);
      if (format == "csv") {
        return {200, "text/csv; charset=utf-8", to_csv(results), id + ".csv"};
      }
      return {200, "application/json", to_json(experiment, results), id + ".json"};
    }
    not_found();
  }

  if (resource == "join") {
    if (parts.size() != 2) not_found();
    if (!post) method_not_allowed();
    const auto doc = parse_body(request.body);
    const auto& code = body_field(doc, "join_code");
    if (!code.is_string()) throw ApiError(400, "invalid_body", "join_code must be a string");
    std::string normalized = code.get<std::string>();
    std::transform(normalized.begin(), normalized.end(), normalized.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    const auto participant = store_.join(normalized);
    const auto experiment = store_.get_experiment(participant.experiment_id);
    return json_response({{"participant_id", participant.participant_id},
                          {"session_token", participant.session_token},
                          {"experiment_id", experiment.experiment_id},
                          {"experiment_name", experiment.name},
                          {"state", to_string(participant.state)},
                          {"dimensions", dimensions_json()}},
                         201);
  }

  if (resource == "participants") {
    if (parts.size() < 3 || parts.size() > 4) not_found();
    const std::string& pid = parts[2];
    require_participant(request, pid);

    if (parts.size() == 3) {
      if (!get) method_not_allowed();
      return json_response(participant_json(store_.get_participant(pid)));
    }
    const std::string& action = parts[3];
    if (action == "schedule") {
      if (!get) method_not_allowed();
      return json_response(schedule_json(comparison_schedule(store_.get_participant(pid).schedule_seed)));
    }
    if (action == "result") {
      if (!get) method_not_allowed();
      return json_response(stored_result_json(store_.get_result(pid)));
    }
    if (action == "ratings") {
      if (!post) method_not_allowed();
      const auto doc = parse_body(request.body);
      const auto entries = parse_rating_entries(body_field(doc, "ratings"));
      const auto record = store_.save_ratings(pid, entries);
      return json_response({{"participant_id", record.participant_id}, {"state", to_string(record.state)}});
    }
    if (action == "comparisons") {
      if (!post) method_not_allowed();
      const auto doc = parse_body(request.body);
      return json_response(stored_result_json(store_.save_comparisons(pid, parse_choices(body_field(doc, "choices")))));
    }
    not_found();
  }

  not_found();
}

struct HttpServer::Impl {
  const ApiService& api;
  ServerConfig config;
  httplib::Server server;
  int bound_port = -1;

  Impl(const ApiService& a, ServerConfig c) : api(a), config(std::move(c)) {}

  void forward(const httplib::Request& req, httplib::Response& res) const {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    request.authorization = req.get_header_value("Authorization");
    request.body = req.body;

    const auto response = api.handle(request);
    res.status = response.status;
    if (response.attachment_filename) {
      res.set_header("Content-Disposition",
                     "attachment; filename=\"" + *response.attachment_filename + "\"");
    }
    res.set_header("Cache-Control", "no-store");
    res.set_content(response.body, response.content_type);
  }
};

HttpServer::HttpServer(const ApiService& api, ServerConfig config)
    : impl_(std::make_unique<Impl>(api, std::move(config))) {
  auto& server = impl_->server;
  const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    impl_->forward(req, res);
  };
  server.Get(R"(/api/.*)", handler);
  server.Post(R"(/api/.*)", handler);
  server.Put(R"(/api/.*)", handler);
  server.Delete(R"(/api/.*)", handler);
  server.Patch(R"(/api/.*)", handler);

  if (impl_->config.static_dir) {
    if (!server.set_mount_point("/", impl_->config.static_dir->string())) {
      throw std::runtime_error("static directory not found: " + impl_->config.static_dir->string());
    }
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(kFallbackIndex), "text/html; charset=utf-8");
    });
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& server = impl_->server;
  const auto& cfg = impl_->config;
  if (cfg.port == 0) {
    impl_->bound_port = server.bind_to_any_port(cfg.host);
  } else {
    impl_->bound_port = server.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
  }
  if (impl_->bound_port < 0) {
    throw std::runtime_error("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  }
  return impl_->bound_port;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace tlx
