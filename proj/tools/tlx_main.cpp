// tlx: run the NASA-TLX service, or score / export offline.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <pthread.h>
#include <thread>

#include "tlx/api.hpp"
#include "tlx/json_codec.hpp"
#include "tlx/report.hpp"
#include "tlx/scoring.hpp"
#include "tlx/store.hpp"

namespace {

struct ListenAddress {
  std::string host;
  int port;
};

ListenAddress parse_listen(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw CLI::ValidationError("--listen", "expected HOST:PORT, got '" + text + "'");
  }
  try {
    const int port = std::stoi(text.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    return {text.substr(0, colon), port};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--listen", "invalid port in '" + text + "'");
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << bytes;
}

int run_serve(const std::string& listen, const std::string& data_dir, const std::string& admin_token,
              const std::string& static_dir) {
  const auto address = parse_listen(listen);

  // Signals are taken synchronously by one thread so stop() runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  tlx::ExperimentStore store(data_dir);
  tlx::ApiService api(store, {admin_token});
  tlx::ServerConfig config{address.host, address.port, std::nullopt};
  if (!static_dir.empty()) config.static_dir = static_dir;
  tlx::HttpServer server(api, config);
  const int port = server.bind();
  std::cerr << "tlx: serving on http://" << address.host << ":" << port << " (data: " << data_dir << ")\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.serve();
  // serve() can also return on its own (socket error); wake the waiter.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

int run_score(const std::string& input) {
  const auto doc = nlohmann::json::parse(read_input(input));
  const auto sheet = tlx::validate_ratings(tlx::parse_rating_entries(doc.at("ratings")));
  const auto set = tlx::ComparisonSet::validate(tlx::parse_choices(doc.at("choices")));
  std::cout << tlx::workload_result_json(tlx::compute_result(sheet, set)).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NASA-TLX workload assessment service"};
  app.require_subcommand(1);

  std::string listen = "127.0.0.1:8080";
  std::string data_dir = "tlx-data";
  std::string admin_token;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--listen", listen, "HOST:PORT to bind")->envname("TLX_LISTEN")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Directory holding experiment files")
      ->envname("TLX_DATA_DIR")
      ->capture_default_str();
  serve->add_option("--admin-token", admin_token, "Bearer token for experimenter routes")
      ->envname("TLX_ADMIN_TOKEN")
      ->required();
  serve->add_option("--static-dir", static_dir, "Built web UI assets served at /")->envname("TLX_STATIC_DIR");

  std::string score_input = "-";
  auto* score = app.add_subcommand("score", "Score one session from JSON {ratings, choices}");
  score->add_option("input", score_input, "JSON file, or - for stdin")->capture_default_str();

  std::uint64_t seed = 0;
  auto* schedule = app.add_subcommand("schedule", "Print the comparison schedule for a seed");
  schedule->add_option("--seed", seed, "Schedule seed")->required();

  std::string experiment_id;
  std::string format = "csv";
  std::string output;
  auto* exp = app.add_subcommand("export", "Export an experiment from a data directory");
  exp->add_option("--data-dir", data_dir)->envname("TLX_DATA_DIR")->capture_default_str();
  exp->add_option("--experiment", experiment_id)->required();
  exp->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  exp->add_option("-o,--output", output, "Output file (default stdout)");

  auto* summary = app.add_subcommand("summary", "Print the summary of an experiment");
  summary->add_option("--data-dir", data_dir)->envname("TLX_DATA_DIR")->capture_default_str();
  summary->add_option("--experiment", experiment_id)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return run_serve(listen, data_dir, admin_token, static_dir);
    if (*score) return run_score(score_input);
    if (*schedule) {
      std::cout << tlx::schedule_json(tlx::comparison_schedule(seed)).dump(2) << "\n";
      return 0;
    }
    if (*exp) {
      tlx::ExperimentStore store(data_dir);
      const auto experiment = store.get_experiment(experiment_id);
      const auto results = store.list_results(experiment_id);
      write_output(output, format == "csv" ? tlx::to_csv(results) : tlx::to_json(experiment, results));
      return 0;
    }
    if (*summary) {
      tlx::ExperimentStore store(data_dir);
      std::cout << tlx::summary_json(tlx::summarize(store.list_results(experiment_id))).dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "tlx: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return 0;
}
