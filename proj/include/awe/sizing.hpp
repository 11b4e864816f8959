#pragma once

// Dimensioning rules for a small three-line kite ground unit.
//
// Every quantity is SI: metres, newtons, seconds, kilograms, amperes, hours
// where the field name says so. All functions are pure.

#include <optional>
#include <string>
#include <vector>

namespace awe {

struct WingParams {
  double area_m2 = 9.0;
  double lift_coeff = 0.8;
  double efficiency = 5.6;
  double wingspan_m = 2.7;
  double height_m = 1.8;  // tip-line to leading-edge centre

  void validate() const;
};

struct GustParams {
  double amplitude_fraction = 0.0;  // in [0, 0.5]
  double period_s = 8.0;
};

struct Environment {
  double air_density_kg_m3 = 1.2;
  double wind_speed_m_s = 3.4;
  double wind_azimuth_rad = 0.0;
  std::optional<GustParams> gust;

  void validate() const;
};

struct LoadGeometry {
  double lateral_range_rad = 0.78539816339744831;  // pi/4
  double elevation_range_rad = 1.0;
  double frame_safety_factor = 2.0;

  void validate() const;
};

struct PartitionPolicy {
  static constexpr double kBandMin = 0.55;
  static constexpr double kBandMax = 0.75;

  double power_line_fraction = 0.65;

  // Throws outside (0, 1). Inside (0, 1) but outside the band is allowed and
  // reported through in_band().
  void validate() const;
  bool in_band() const;
};

struct LineSpec {
  double diameter_m = 0.003;
  double min_breaking_load_N = 1.1e4;
  double density_kg_m3 = 970.0;
  double length_m = 30.0;
  double safety_factor = 4.5;

  void validate() const;
};

struct PowerSupplyParams {
  int battery_count = 16;
  double capacity_Ah_at_rated = 20.0;
  double rated_current_A = 1.0;
  double peukert_exponent = 1.2;
  double ac_dc_factor = 10.0;
  double idle_battery_current_A = 20.0;  // whole bank
  double drive_current_A = 0.0;          // average motor draw, drive (AC) side
  double required_hours = 0.0;           // 0 disables the runtime check

  void validate() const;
};

struct LoggerGroup {
  double signal_count = 0;
  double bytes_per_signal = 0;
  double sample_period_s = 1;
};

struct LoggerPlan {
  double duration_s = 0;
  std::vector<LoggerGroup> groups;

  void validate() const;
};

// Carriage-to-line transmission of the steering linear motion system.
struct LmsParams {
  double carriage_multiplier = 4.0;
  double carriage_limit_m = 0.35;
};

enum class Severity { Warning, Fail };

struct Flag {
  std::string code;
  Severity severity = Severity::Warning;
  std::string message;
};

struct LineLoads {
  double power_N = 0;
  double left_N = 0;
  double right_N = 0;
  bool clamped = false;
};

struct TurnGeometry {
  double min_turn_radius_m = 0;
  double path_length_m = 0;
};

struct SteeringDelta {
  double delta_m = 0;
  double roll_angle_rad = 0;
};

struct LineCheck {
  double required_mbl_N = 0;
  double pulley_min_diameter_m = 0;
  double mass_per_meter_kg = 0;
  bool pass = true;
};

struct ActuationRequirements {
  double steer_stroke_m = 0;  // symmetric, +-
  double steer_speed_m_s = 0;
  double power_stroke_min_m = 0;
  double power_stroke_max_m = 0;
  double power_speed_m_s = 0;
};

struct LmsVerdict {
  double available_m = 0;  // symmetric, +-
  double required_m = 0;
  bool pass = true;
};

// nullopt stands for an unbounded value (no crosswind motion, no current draw).
using MaybeUnbounded = std::optional<double>;

// Common factor 0.5*rho*C_L*E^2*(1+1/E^2)^(3/2) of the crosswind force law,
// in N/(m^2 * (m/s)^2).
double crosswind_force_coefficient(const WingParams& wing, double air_density_kg_m3);

double peak_traction_force(const WingParams& wing, const Environment& env);
double min_traction_force(double peak_N);
TurnGeometry figure_eight_geometry(const WingParams& wing);
MaybeUnbounded force_oscillation_period(const WingParams& wing, const Environment& env,
                                        std::optional<double> path_length_m = std::nullopt);
double steering_force_difference(const WingParams& wing, const Environment& env, double delta_m);
SteeringDelta max_steering_delta(const WingParams& wing);
LineLoads partition_line_loads(double total_N, double delta_force_N, const PartitionPolicy& policy);
LineCheck line_requirements(double peak_line_force_N, const LineSpec& spec);
ActuationRequirements actuation_requirements(const WingParams& wing);
LmsVerdict check_lms_feasibility(const WingParams& wing, const LmsParams& lms = {});
double translate_drive_current(double drive_side_A, double factor = 10.0);
MaybeUnbounded battery_runtime(const PowerSupplyParams& supply, double total_battery_current_A);
double logger_memory(const LoggerPlan& plan);
double max_wind_for_wing(const WingParams& wing, double air_density_kg_m3 = 1.2,
                         double max_loading_N_m2 = 250.0);

struct DesignReport {
  double peak_force_N = 0;
  double min_force_N = 0;
  double design_force_N = 0;
  MaybeUnbounded oscillation_period_s;
  double path_length_m = 0;
  double min_turn_radius_m = 0;
  double max_delta_m = 0;
  double roll_angle_rad = 0;
  double max_delta_force_N = 0;
  LineLoads line_loads;
  ActuationRequirements actuation;
  LmsVerdict lms;
  double peak_line_force_N = 0;
  LineCheck line;
  double line_required_diameter_m = 0;
  double line_total_mass_kg = 0;
  double battery_current_A = 0;
  MaybeUnbounded battery_runtime_h;
  double logger_memory_B = 0;
  double max_wind_m_s = 0;
  std::vector<Flag> flags;

  bool has_failure() const;
};

struct DesignInputs {
  WingParams wing;
  Environment env;
  LoadGeometry geometry;
  PartitionPolicy policy;
  LineSpec line;
  PowerSupplyParams supply;
  LoggerPlan logger;
  LmsParams lms;
};

DesignReport build_design_report(const DesignInputs& in);

}  // namespace awe
