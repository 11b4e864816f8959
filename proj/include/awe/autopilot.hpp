#pragma once

// Figure-eight crosswind controller and the manual/automatic arbiter.

#include "awe/sim.hpp"

namespace awe {

struct AutopilotConfig {
  double target_azimuth_rad = 0.6;    // targets at +-azimuth
  double target_elevation_rad = 0.3;
  double switch_radius_rad = 0.15;
  double switch_holdoff_s = 0.5;
  double steering_gain_m_per_rad = 0.28;
  double command_limit_m = 0.35;

  void validate() const;
};

enum class ControlMode { Manual = 0, Auto = 1 };

const char* to_string(ControlMode m);

// +1: target at +azimuth, -1: target at -azimuth.
enum class TargetSide : int { Negative = -1, Positive = 1 };

struct AutopilotState {
  TargetSide active = TargetSide::Positive;
  double last_switch_s = -1e9;
  // While nonzero, the heading error is taken with this sign so that the turn
  // after a target switch goes up, through the zenith heading.
  int turn_latch = 0;
};

double great_circle_distance(double el1, double az1, double el2, double az2);
// Initial course from point 1 to point 2, in the kite heading convention.
double great_circle_bearing(double el1, double az1, double el2, double az2);

double target_distance(const KiteState& state, const AutopilotConfig& cfg, TargetSide side);

// Toggles the active target when it is within the switch radius and the
// hold-off since the previous toggle has elapsed.
AutopilotState target_switch(const KiteState& state, const AutopilotConfig& cfg,
                             const AutopilotState& ap);

struct AutopilotOutput {
  AutopilotState state;
  double heading_error_rad = 0;
  double steer_cmd_m = 0;
};

// Runs the target switch and returns the saturated steering carriage command.
AutopilotOutput autopilot_update(const KiteState& state, const AutopilotConfig& cfg,
                                 const AutopilotState& ap);

// Operator joystick, both axes in [-1, 1].
struct ManualInput {
  double steering = 0;
  double power = 0;
};

struct ActuatorCommands {
  double steer_m = 0;
  double power_m = 0;
};

// Linear axis mapping: steering [-1, 1] onto the carriage stroke, power
// [-1, 0] onto [power_min_m, 0] (positive power is full power, z = 0).
ActuatorCommands map_joystick(const ManualInput& in, const ActuatorLimits& limits);

class ModeArbiter {
 public:
  explicit ModeArbiter(ActuatorLimits limits = {}, double control_period_s = 0.02)
      : limits_(limits), control_period_s_(control_period_s) {}

  ControlMode mode() const { return mode_; }

  // Explicit transition. Entering Auto re-initialises the command slew at the
  // current carriage position.
  void set_mode(ControlMode mode, double current_steer_carriage_m);

  ActuatorCommands apply(const ManualInput& manual, double auto_steer_cmd_m);

  double last_steer_cmd_m() const { return last_steer_m_; }

 private:
  ActuatorLimits limits_;
  double control_period_s_;
  ControlMode mode_ = ControlMode::Manual;
  double last_steer_m_ = 0.0;
};

}  // namespace awe
