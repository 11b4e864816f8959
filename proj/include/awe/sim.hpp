#pragma once

// Kinematic tethered-wing model on the wind-window quarter sphere.
//
// Frame: X downwind, Z up, Y completing a right-handed frame (to the left of
// an observer at the ground unit looking downwind). Elevation is measured from
// the ground, azimuth from X towards Y, heading from the local "up" direction
// (towards the zenith) towards increasing azimuth. Increasing heading is a
// counter-clockwise turn as seen from the ground unit.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "awe/sizing.hpp"

namespace awe {

struct KiteState {
  double elevation_rad = 0.3;
  double azimuth_rad = 0.0;
  double heading_rad = 0.0;
  double tether_length_m = 30.0;
  double time_s = 0.0;
};

struct ActuatorLimits {
  double steer_limit_m = 0.35;      // carriage stroke, symmetric
  double steer_rate_m_s = 0.4;      // 0.01 m/rev at 2400 rpm
  double carriage_multiplier = 4.0; // line difference per carriage metre
  double power_min_m = -0.5;        // deepest centre-line shortening
  double power_rate_m_s = 0.15;

  void validate() const;
};

struct ActuatorState {
  double steer_carriage_m = 0.0;
  double steer_cmd_m = 0.0;
  double power_carriage_m = 0.0;
  double power_cmd_m = 0.0;
  bool overrange = false;  // last step clamped a command to the stroke

  // Steering line difference, right minus left.
  double delta_m(const ActuatorLimits& limits) const {
    return limits.carriage_multiplier * steer_carriage_m;
  }
  // Centre-line shortening in [power_min_m, 0].
  double depower_m() const { return power_carriage_m; }
};

struct LineForces {
  double total_N = 0;
  double power_N = 0;
  double left_N = 0;
  double right_N = 0;
  double delta_N = 0;
  bool clamped = false;  // a steering line went slack
};

enum class FlightStatus { Flying = 0, Landed = 1, OutOfWindow = 2, Stalled = 3 };
enum class Integrator { Euler, RK4 };

const char* to_string(FlightStatus s);

struct SimConfig {
  double dt_s = 0.01;
  Integrator integrator = Integrator::RK4;
  bool gravity_drift_enabled = false;
  double gravity_drift_coeff = 0.1;
  double gravity_speed_floor_m_s = 2.0;
  double depower_min_multiplier = 0.25;
  std::uint64_t seed = 1;
  double stall_speed_m_s = 1.0;
  double landing_elevation_rad = 0.1;
  ActuatorLimits actuators;

  void validate() const;
};

// Raised when the integrator produces a non-finite state.
class SimulationFault : public std::runtime_error {
 public:
  SimulationFault(const std::string& what, const KiteState& snapshot)
      : std::runtime_error(what), snapshot_(snapshot) {}
  const KiteState& snapshot() const { return snapshot_; }

 private:
  KiteState snapshot_;
};

// Linear de-power law: 1 at z = 0, mu_min at z = power_min_m.
double depower_multiplier(double depower_m, double mu_min, double power_min_m = -0.5);

// Crosswind speed E * W * cos(theta) * cos(phi) * mu(z).
double apparent_speed(const KiteState& state, double wind_m_s, const WingParams& wing,
                      double depower_m, double mu_min = 0.25, double power_min_m = -0.5);

// Steering turn rate, calibrated so that delta = 0.15 w_s turns on a 2.5 w_s radius.
double turn_rate(const WingParams& wing, double delta_m, double speed_m_s);

// Heading rate induced by gravity; zero unless enabled in the config.
double gravity_drift_rate(const KiteState& state, double speed_m_s, const SimConfig& cfg);

struct ControlInputs {
  double delta_m = 0;
  double depower_m = 0;
  double wind_m_s = 0;
};

struct StateRates {
  double elevation = 0;
  double azimuth = 0;
  double heading = 0;
};

StateRates state_rates(const KiteState& state, const ControlInputs& in, const WingParams& wing,
                       const SimConfig& cfg);

struct StepResult {
  KiteState state;
  LineForces forces;
  FlightStatus status = FlightStatus::Flying;
};

// Advances the kinematic state by cfg.dt_s with inputs held over the step.
// Throws SimulationFault on a non-finite result.
StepResult step(const KiteState& state, const ActuatorState& act, double wind_m_s,
                const Environment& env, const WingParams& wing, const PartitionPolicy& policy,
                const SimConfig& cfg);

FlightStatus classify(const KiteState& state, double speed_m_s, const SimConfig& cfg);

LineForces instantaneous_forces(const KiteState& state, double wind_m_s, const Environment& env,
                                const WingParams& wing, double delta_m, double depower_m,
                                const PartitionPolicy& policy, double mu_min = 0.25,
                                double power_min_m = -0.5);

// Moves both carriages toward their commands under the rate limits, then
// clamps to the strokes. Commands outside the stroke set `overrange`.
ActuatorState actuator_step(const ActuatorState& act, double dt_s,
                            const ActuatorLimits& limits = {});

// Smooth, seeded, bounded gust process. Without gust parameters it returns the
// steady wind for every t.
class GustProcess {
 public:
  GustProcess(const Environment& env, std::uint64_t seed);
  double sample(double t_s) const;

 private:
  static constexpr int kModes = 4;
  double mean_ = 0;
  double amplitude_ = 0;
  double omega_[kModes] = {};
  double phase_[kModes] = {};
  double weight_[kModes] = {};
};

double wind_sample(const GustProcess& gusts, double t_s);

double wrap_angle(double a);

}  // namespace awe
