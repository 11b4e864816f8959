#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "awe/config.hpp"
#include "awe/flight.hpp"
#include "awe/report.hpp"
#include "awe/server.hpp"
#include "awe/telemetry.hpp"

namespace {

std::atomic<bool> g_stop{false};
awe::ServeRunner* g_runner = nullptr;

extern "C" void on_signal(int) {
  g_stop = true;
  if (g_runner) g_runner->stop();
}

awe::AppConfig config_from(const std::string& path, std::optional<std::uint64_t> seed) {
  awe::AppConfig cfg = path.empty() ? awe::parse_config("{}") : awe::load_config(path);
  if (seed) cfg.sim.core.seed = *seed;
  return cfg;
}

int run_size(const awe::AppConfig& cfg, const std::string& format, const std::string& out) {
  const awe::DesignReport report = awe::build_design_report(cfg.design);
  const std::string text =
      format == "json" ? awe::format_report_json(report) + "\n" : awe::format_report_text(report);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
    f << text;
  }
  return report.has_failure() ? 2 : 0;
}

int run_simulate(const awe::AppConfig& cfg, double duration, const std::string& out,
                 const std::string& format) {
  const awe::SimulationResult result = awe::run_simulation(cfg, duration);
  if (!out.empty()) awe::flush_csv(result.samples, out);
  if (format == "json") {
    std::cout << awe::summary_to_json(result.summary).dump(2) << "\n";
  } else {
    std::cout << awe::format_summary_text(result.summary);
  }
  return 0;
}

int run_serve(const awe::AppConfig& cfg) {
  awe::ServeRunner runner(cfg);
  g_runner = &runner;
  std::fprintf(stderr, "serving on %s (port %u)\n", cfg.serve.bind.c_str(),
               static_cast<unsigned>(runner.port()));
  runner.wait();
  g_runner = nullptr;
  return 0;
}

int run_replay(const awe::AppConfig& cfg, const std::string& path, bool bind) {
  const auto samples = awe::replay(path);
  if (bind) {
    awe::replay_over_websocket(samples, cfg, g_stop, [&](unsigned short port) {
      std::fprintf(stderr, "replaying %zu samples on %s (port %u)\n", samples.size(),
                   cfg.serve.bind.c_str(), static_cast<unsigned>(port));
    });
    return 0;
  }
  std::uint64_t seq = 0;
  for (const auto& s : samples) std::cout << awe::replay_frame(seq++, s) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-unit sizing and kite flight simulation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string format = "text";
  std::string out;
  std::string bind;
  double duration = 60.0;
  std::optional<std::uint64_t> seed;
  std::string replay_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override sim.seed");
  };

  auto* size = app.add_subcommand("size", "Print the design report");
  add_common(size);
  size->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
  size->add_option("--out", out, "Write the report to this file instead of stdout");

  auto* simulate = app.add_subcommand("simulate", "Run the autopilot closed loop headless");
  add_common(simulate);
  simulate->add_option("--duration", duration, "Simulated seconds")->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", out, "Telemetry CSV path");
  simulate->add_option("--format", format, "Summary format")->check(CLI::IsMember({"json", "text"}));

  auto* serve = app.add_subcommand("serve", "Live simulation over WebSocket");
  add_common(serve);
  serve->add_option("--bind", bind, "addr:port to listen on");

  auto* replay = app.add_subcommand("replay", "Re-emit a telemetry log as protocol frames");
  add_common(replay);
  replay->add_option("log", replay_path, "Telemetry CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("--bind", bind, "Stream over WebSocket at addr:port instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    awe::AppConfig cfg = config_from(config_path, seed);
    if (!bind.empty()) {
      cfg.serve.bind = bind;
      (void)awe::parse_endpoint(bind);
    }
    if (*size) return run_size(cfg, format, out);
    if (*simulate) return run_simulate(cfg, duration, out, format);
    if (*serve) return run_serve(cfg);
    if (*replay) return run_replay(cfg, replay_path, !bind.empty());
  } catch (const awe::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const awe::CsvError& e) {
    std::fprintf(stderr, "log error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
