#pragma once

// Closed-loop flight: physics at the simulation step, controller and
// telemetry at their own whole-multiple periods, all in simulation time.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "awe/autopilot.hpp"
#include "awe/config.hpp"
#include "awe/sim.hpp"
#include "awe/telemetry.hpp"

namespace awe {

class Flight {
 public:
  explicit Flight(const AppConfig& cfg);

  // Restores the configured initial state, keeping the current wind override.
  void reset();

  // Operator inputs; take effect at the next control step.
  void set_manual(const ManualInput& in) { manual_ = in; }
  void set_mode(ControlMode mode);
  void set_wind_speed(double wind_m_s);

  // Advances one physics step. No-op once the flight has terminated.
  void step();

  bool terminated() const { return status_ != FlightStatus::Flying; }
  bool control_due() const { return step_index_ % control_every_ == 0; }
  bool telemetry_due() const { return step_index_ % telemetry_every_ == 0; }

  std::uint64_t step_index() const { return step_index_; }
  std::uint64_t control_steps_done() const { return control_steps_; }
  int steps_per_control() const { return control_every_; }
  double time_s() const { return state_.time_s; }

  const KiteState& state() const { return state_; }
  const ActuatorState& actuators() const { return act_; }
  const LineForces& forces() const { return forces_; }
  FlightStatus status() const { return status_; }
  ControlMode mode() const { return arbiter_.mode(); }
  double wind_m_s() const;

  // Snapshot of the current state in telemetry form.
  TelemetrySample sample() const;

 private:
  void control();
  void refresh_forces();
  StepResult step_state() const;

  AppConfig cfg_;
  GustProcess gusts_;
  std::optional<double> wind_override_;
  double wing_loading_wind_;
  int control_every_;
  int telemetry_every_;

  KiteState state_;
  ActuatorState act_;
  LineForces forces_;
  FlightStatus status_ = FlightStatus::Flying;
  AutopilotState ap_;
  ModeArbiter arbiter_;
  ManualInput manual_;
  std::uint64_t step_index_ = 0;
  std::uint64_t control_steps_ = 0;
};

struct FlightSummary {
  double duration_s = 0;
  std::size_t samples = 0;
  int eights = 0;
  double peak_force_N = 0;
  double peak_force_fraction = 0;  // of the static crosswind peak force
  double mean_force_N = 0;
  double min_force_N = 0;
  double force_ratio = 0;
  std::optional<double> measured_period_s;
  std::optional<double> path_length_per_eight_m;
  std::optional<double> predicted_period_s;
  double analysis_start_s = 0;
  double max_abs_azimuth_rad = 0;
  FlightStatus final_status = FlightStatus::Flying;
  bool log_budget_exhausted = false;
  std::size_t rejected_samples = 0;
};

// Statistics of a logged run. Eights are counted over the whole log; the
// remaining force and period figures use only samples at or after the
// analysis start so the launch transient does not dominate.
FlightSummary summarize(const std::vector<TelemetrySample>& samples, const WingParams& wing,
                        const Environment& env, double analysis_start_s);

struct SimulationResult {
  std::vector<TelemetrySample> samples;
  FlightSummary summary;
};

// Runs the configured closed loop for duration_s of simulation time.
SimulationResult run_simulation(const AppConfig& cfg, double duration_s);

nlohmann::ordered_json summary_to_json(const FlightSummary& s);
std::string format_summary_text(const FlightSummary& s);

}  // namespace awe
