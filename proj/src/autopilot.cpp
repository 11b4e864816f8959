#include "awe/autopilot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace awe {

namespace {
constexpr double kPi = std::numbers::pi;
}

void AutopilotConfig::validate() const {
  auto require = [](bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
  };
  require(target_azimuth_rad > 0 && target_azimuth_rad < kPi / 2,
          "autopilot.target_azimuth_rad must be in (0, pi/2)");
  require(target_elevation_rad > 0 && target_elevation_rad < kPi / 2,
          "autopilot.target_elevation_rad must be in (0, pi/2)");
  require(switch_radius_rad > 0 && std::isfinite(switch_radius_rad),
          "autopilot.switch_radius_rad must be > 0");
  require(switch_holdoff_s >= 0 && std::isfinite(switch_holdoff_s),
          "autopilot.switch_holdoff_s must be >= 0");
  require(steering_gain_m_per_rad > 0 && std::isfinite(steering_gain_m_per_rad),
          "autopilot.steering_gain_m_per_rad must be > 0");
  require(command_limit_m > 0 && std::isfinite(command_limit_m),
          "autopilot.command_limit_m must be > 0");
}

const char* to_string(ControlMode m) { return m == ControlMode::Auto ? "auto" : "manual"; }

double great_circle_distance(double el1, double az1, double el2, double az2) {
  // Vincenty form; well conditioned for both tiny and large separations.
  const double dl = az2 - az1;
  const double a = std::cos(el2) * std::sin(dl);
  const double b = std::cos(el1) * std::sin(el2) - std::sin(el1) * std::cos(el2) * std::cos(dl);
  const double c = std::sin(el1) * std::sin(el2) + std::cos(el1) * std::cos(el2) * std::cos(dl);
  return std::atan2(std::hypot(a, b), c);
}

double great_circle_bearing(double el1, double az1, double el2, double az2) {
  const double dl = az2 - az1;
  return std::atan2(std::sin(dl) * std::cos(el2),
                    std::cos(el1) * std::sin(el2) - std::sin(el1) * std::cos(el2) * std::cos(dl));
}

double target_distance(const KiteState& state, const AutopilotConfig& cfg, TargetSide side) {
  return great_circle_distance(state.elevation_rad, state.azimuth_rad, cfg.target_elevation_rad,
                               static_cast<int>(side) * cfg.target_azimuth_rad);
}

AutopilotState target_switch(const KiteState& state, const AutopilotConfig& cfg,
                             const AutopilotState& ap) {
  AutopilotState out = ap;
  if (target_distance(state, cfg, ap.active) < cfg.switch_radius_rad &&
      state.time_s - ap.last_switch_s >= cfg.switch_holdoff_s) {
    out.active = ap.active == TargetSide::Positive ? TargetSide::Negative : TargetSide::Positive;
    out.last_switch_s = state.time_s;
    out.turn_latch = static_cast<int>(out.active);
  }
  return out;
}

AutopilotOutput autopilot_update(const KiteState& state, const AutopilotConfig& cfg,
                                 const AutopilotState& ap) {
  AutopilotOutput out;
  out.state = target_switch(state, cfg, ap);
  const double target_az = static_cast<int>(out.state.active) * cfg.target_azimuth_rad;
  const double reference = great_circle_bearing(state.elevation_rad, state.azimuth_rad,
                                                cfg.target_elevation_rad, target_az);
  double error = wrap_angle(reference - state.heading_rad);

  if (out.state.turn_latch != 0) {
    if (error * out.state.turn_latch < 0 && std::abs(error) > kPi / 2) {
      error += 2.0 * kPi * out.state.turn_latch;
    } else {
      out.state.turn_latch = 0;
    }
  }
  out.heading_error_rad = error;
  out.steer_cmd_m = std::clamp(cfg.steering_gain_m_per_rad * error, -cfg.command_limit_m,
                               cfg.command_limit_m);
  return out;
}

ActuatorCommands map_joystick(const ManualInput& in, const ActuatorLimits& limits) {
  ActuatorCommands out;
  out.steer_m = std::clamp(in.steering, -1.0, 1.0) * limits.steer_limit_m;
  out.power_m = -std::clamp(in.power, -1.0, 0.0) * limits.power_min_m;
  return out;
}

void ModeArbiter::set_mode(ControlMode mode, double current_steer_carriage_m) {
  if (mode == ControlMode::Auto && mode_ != ControlMode::Auto) {
    last_steer_m_ = current_steer_carriage_m;
  }
  mode_ = mode;
}

ActuatorCommands ModeArbiter::apply(const ManualInput& manual, double auto_steer_cmd_m) {
  ActuatorCommands out = map_joystick(manual, limits_);
  if (mode_ == ControlMode::Auto) {
    const double max_change = limits_.steer_rate_m_s * control_period_s_;
    const double target =
        std::clamp(auto_steer_cmd_m, -limits_.steer_limit_m, limits_.steer_limit_m);
    out.steer_m = last_steer_m_ + std::clamp(target - last_steer_m_, -max_change, max_change);
  }
  last_steer_m_ = out.steer_m;
  return out;
}

}  // namespace awe
