#pragma once

// JSON configuration document shared by all entry points.

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "awe/autopilot.hpp"
#include "awe/sim.hpp"
#include "awe/sizing.hpp"

namespace awe {

struct SimSettings {
  SimConfig core;
  double control_period_s = 0.02;
  double telemetry_period_s = 0.02;
  double analysis_start_s = 20.0;  // summary statistics skip the transient before this
  double telemetry_budget_B = 0.0; // 0 sizes the log for the requested duration
  KiteState initial{0.3, 0.0, 1.5707963267948966, 30.0, 0.0};
  ControlMode initial_mode = ControlMode::Auto;
};

struct ServeConfig {
  std::string bind = "127.0.0.1:8765";
  double stream_rate_hz = 20.0;
  double time_scale = 1.0;  // simulated seconds per wall-clock second
  std::size_t queue_capacity = 64;

  void validate(double dt_s) const;
};

struct AppConfig {
  DesignInputs design;
  SimSettings sim;
  AutopilotConfig autopilot;
  ServeConfig serve;

  // Checks every section and the cross-section constraints (loop periods are
  // whole multiples of the physics step, autopilot limit within the stroke).
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  // 1-based; 0 when the error has no source position.
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Parses and validates. Missing keys keep their defaults; unknown keys,
// wrong types and out-of-range values throw ConfigError.
AppConfig parse_config(std::string_view text);
AppConfig load_config(const std::filesystem::path& path);

// Serialises every field, so the output is itself a complete config.
std::string dump_config(const AppConfig& cfg, int indent = 2);

}  // namespace awe
