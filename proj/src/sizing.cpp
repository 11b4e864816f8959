#include "awe/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace awe {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void WingParams::validate() const {
  require(finite_positive(area_m2), "wing.area_m2 must be > 0");
  require(finite_positive(lift_coeff) && lift_coeff <= 2.0, "wing.lift_coeff must be in (0, 2]");
  require(std::isfinite(efficiency) && efficiency > 1.0 && efficiency <= 20.0,
          "wing.efficiency must be in (1, 20]");
  require(finite_positive(wingspan_m), "wing.wingspan_m must be > 0");
  require(finite_positive(height_m), "wing.height_m must be > 0");
  require(height_m < wingspan_m, "wing.height_m must be smaller than wing.wingspan_m");
}

void Environment::validate() const {
  require(finite_positive(air_density_kg_m3), "environment.air_density_kg_m3 must be > 0");
  require(std::isfinite(wind_speed_m_s) && wind_speed_m_s >= 0.0,
          "environment.wind_speed_m_s must be >= 0");
  require(std::isfinite(wind_azimuth_rad), "environment.wind_azimuth_rad must be finite");
  if (gust) {
    require(std::isfinite(gust->amplitude_fraction) && gust->amplitude_fraction >= 0.0 &&
                gust->amplitude_fraction <= 0.5,
            "environment.gust.amplitude_fraction must be in [0, 0.5]");
    require(finite_positive(gust->period_s), "environment.gust.period_s must be > 0");
  }
}

void LoadGeometry::validate() const {
  const double half_pi = std::numbers::pi / 2;
  require(finite_positive(lateral_range_rad) && lateral_range_rad <= half_pi,
          "geometry.lateral_range_rad must be in (0, pi/2]");
  require(finite_positive(elevation_range_rad) && elevation_range_rad <= half_pi,
          "geometry.elevation_range_rad must be in (0, pi/2]");
  require(std::isfinite(frame_safety_factor) && frame_safety_factor >= 1.0,
          "geometry.frame_safety_factor must be >= 1");
}

void PartitionPolicy::validate() const {
  require(std::isfinite(power_line_fraction) && power_line_fraction > 0.0 &&
              power_line_fraction < 1.0,
          "partition.power_line_fraction must be in (0, 1)");
}

bool PartitionPolicy::in_band() const {
  return power_line_fraction >= kBandMin && power_line_fraction <= kBandMax;
}

void LineSpec::validate() const {
  require(finite_positive(diameter_m), "line.diameter_m must be > 0");
  require(finite_positive(min_breaking_load_N), "line.min_breaking_load_N must be > 0");
  require(finite_positive(density_kg_m3), "line.density_kg_m3 must be > 0");
  require(finite_positive(length_m), "line.length_m must be > 0");
  require(std::isfinite(safety_factor) && safety_factor >= 1.0, "line.safety_factor must be >= 1");
}

void PowerSupplyParams::validate() const {
  require(battery_count >= 1, "supply.battery_count must be >= 1");
  require(finite_positive(capacity_Ah_at_rated), "supply.capacity_Ah_at_rated must be > 0");
  require(finite_positive(rated_current_A), "supply.rated_current_A must be > 0");
  require(std::isfinite(peukert_exponent) && peukert_exponent >= 1.0,
          "supply.peukert_exponent must be >= 1");
  require(finite_positive(ac_dc_factor), "supply.ac_dc_factor must be > 0");
  require(std::isfinite(idle_battery_current_A) && idle_battery_current_A >= 0.0,
          "supply.idle_battery_current_A must be >= 0");
  require(std::isfinite(drive_current_A) && drive_current_A >= 0.0,
          "supply.drive_current_A must be >= 0");
  require(std::isfinite(required_hours) && required_hours >= 0.0,
          "supply.required_hours must be >= 0");
}

void LoggerPlan::validate() const {
  require(std::isfinite(duration_s) && duration_s > 0.0, "logger.duration_s must be > 0");
  for (const auto& g : groups) {
    require(finite_positive(g.signal_count), "logger group signal_count must be > 0");
    require(finite_positive(g.bytes_per_signal), "logger group bytes_per_signal must be > 0");
    require(finite_positive(g.sample_period_s), "logger group sample_period_s must be > 0");
  }
}

double crosswind_force_coefficient(const WingParams& wing, double air_density_kg_m3) {
  const double e2 = wing.efficiency * wing.efficiency;
  return 0.5 * air_density_kg_m3 * wing.lift_coeff * e2 * std::pow(1.0 + 1.0 / e2, 1.5);
}

double peak_traction_force(const WingParams& wing, const Environment& env) {
  const double w = env.wind_speed_m_s;
  return crosswind_force_coefficient(wing, env.air_density_kg_m3) * wing.area_m2 * w * w;
}

double min_traction_force(double peak_N) { return peak_N / 4.0; }

TurnGeometry figure_eight_geometry(const WingParams& wing) {
  const double radius = 2.5 * wing.wingspan_m;
  return {radius, 2.0 * (2.0 * std::numbers::pi * radius)};
}

MaybeUnbounded force_oscillation_period(const WingParams& wing, const Environment& env,
                                        std::optional<double> path_length_m) {
  if (!(env.wind_speed_m_s > 0.0)) return std::nullopt;
  const double length = path_length_m.value_or(figure_eight_geometry(wing).path_length_m);
  return 0.5 * length / (wing.efficiency * env.wind_speed_m_s);
}

double steering_force_difference(const WingParams& wing, const Environment& env, double delta_m) {
  const double ws = wing.wingspan_m;
  // The force law carries the 1/2 density factor; the steering relation does not.
  return (wing.height_m / (ws * ws)) * 2.0 * peak_traction_force(wing, env) * delta_m;
}

SteeringDelta max_steering_delta(const WingParams& wing) {
  const double delta = 0.15 * wing.wingspan_m;
  return {delta, delta / wing.wingspan_m};
}

LineLoads partition_line_loads(double total_N, double delta_force_N,
                               const PartitionPolicy& policy) {
  if (!(total_N >= 0.0)) throw std::invalid_argument("partition: total force must be >= 0");
  const double p = policy.power_line_fraction;
  const double steering_share = (1.0 - p) * total_N;
  LineLoads out;
  out.power_N = p * total_N;
  out.left_N = 0.5 * (steering_share + delta_force_N);
  out.right_N = 0.5 * (steering_share - delta_force_N);
  if (out.left_N >= 0.0 && out.right_N >= 0.0) return out;

  // The slack steering line goes to zero; the loaded one keeps the full
  // difference and the power line carries the remainder.
  out.clamped = true;
  const double loaded = std::min(std::abs(delta_force_N), total_N);
  if (delta_force_N > 0) {
    out.left_N = loaded;
    out.right_N = 0.0;
  } else {
    out.left_N = 0.0;
    out.right_N = loaded;
  }
  out.power_N = total_N - loaded;
  return out;
}

LineCheck line_requirements(double peak_line_force_N, const LineSpec& spec) {
  if (!(peak_line_force_N >= 0.0)) throw std::invalid_argument("line force must be >= 0");
  LineCheck out;
  out.required_mbl_N = spec.safety_factor * peak_line_force_N;
  out.pulley_min_diameter_m = 30.0 * spec.diameter_m;
  const double radius = 0.5 * spec.diameter_m;
  out.mass_per_meter_kg = std::numbers::pi * radius * radius * spec.density_kg_m3;
  out.pass = spec.min_breaking_load_N >= out.required_mbl_N;
  return out;
}

ActuationRequirements actuation_requirements(const WingParams& wing) {
  ActuationRequirements out;
  out.steer_stroke_m = 0.5 * wing.wingspan_m;
  out.steer_speed_m_s = wing.wingspan_m / 3.0;
  out.power_stroke_min_m = -0.25 * wing.height_m;
  out.power_stroke_max_m = 0.0;
  out.power_speed_m_s = 0.25 * wing.height_m;
  return out;
}

LmsVerdict check_lms_feasibility(const WingParams& wing, const LmsParams& lms) {
  LmsVerdict out;
  out.available_m = lms.carriage_multiplier * lms.carriage_limit_m;
  out.required_m = actuation_requirements(wing).steer_stroke_m;
  // Products like 4 * 0.35 do not land exactly on 1.4 in binary; treat the
  // boundary case as feasible.
  out.pass = out.available_m >= out.required_m - 1e-12 * std::max(1.0, out.required_m);
  return out;
}

double translate_drive_current(double drive_side_A, double factor) {
  if (!(drive_side_A >= 0.0)) throw std::invalid_argument("drive current must be >= 0");
  return drive_side_A * factor;
}

MaybeUnbounded battery_runtime(const PowerSupplyParams& supply, double total_battery_current_A) {
  if (!(total_battery_current_A > 0.0)) return std::nullopt;
  // Peukert: I^k * t is constant, pinned at the rated discharge point.
  const double k = supply.peukert_exponent;
  const double per_battery = total_battery_current_A / supply.battery_count;
  const double rated_hours = supply.capacity_Ah_at_rated / supply.rated_current_A;
  const double peukert_capacity = std::pow(supply.rated_current_A, k) * rated_hours;
  return peukert_capacity / std::pow(per_battery, k);
}

double logger_memory(const LoggerPlan& plan) {
  double rate = 0.0;
  for (const auto& g : plan.groups) rate += g.signal_count * g.bytes_per_signal / g.sample_period_s;
  return plan.duration_s * rate;
}

double max_wind_for_wing(const WingParams& wing, double air_density_kg_m3,
                         double max_loading_N_m2) {
  return std::sqrt(max_loading_N_m2 / crosswind_force_coefficient(wing, air_density_kg_m3));
}

bool DesignReport::has_failure() const {
  return std::any_of(flags.begin(), flags.end(),
                     [](const Flag& f) { return f.severity == Severity::Fail; });
}

DesignReport build_design_report(const DesignInputs& in) {
  in.wing.validate();
  in.env.validate();
  in.geometry.validate();
  in.policy.validate();
  in.line.validate();
  in.supply.validate();
  if (!in.logger.groups.empty()) in.logger.validate();

  DesignReport r;
  r.peak_force_N = peak_traction_force(in.wing, in.env);
  r.min_force_N = min_traction_force(r.peak_force_N);
  r.design_force_N = in.geometry.frame_safety_factor * r.peak_force_N;

  const auto turn = figure_eight_geometry(in.wing);
  r.min_turn_radius_m = turn.min_turn_radius_m;
  r.path_length_m = turn.path_length_m;
  r.oscillation_period_s = force_oscillation_period(in.wing, in.env, turn.path_length_m);

  const auto delta = max_steering_delta(in.wing);
  r.max_delta_m = delta.delta_m;
  r.roll_angle_rad = delta.roll_angle_rad;
  r.max_delta_force_N = steering_force_difference(in.wing, in.env, delta.delta_m);

  if (!in.policy.in_band()) {
    r.flags.push_back({"partition_out_of_band", Severity::Warning,
                       "power line fraction outside the 0.55-0.75 band"});
  }
  r.line_loads = partition_line_loads(r.peak_force_N, r.max_delta_force_N, in.policy);
  if (r.line_loads.clamped) {
    r.flags.push_back({"partition_clamped", Severity::Warning,
                       "steering force difference exceeds the steering-line share"});
  }

  r.actuation = actuation_requirements(in.wing);
  r.lms = check_lms_feasibility(in.wing, in.lms);
  if (!r.lms.pass) {
    r.flags.push_back({"lms_stroke", Severity::Fail,
                       "steering LMS range is smaller than half the wingspan"});
  }

  r.peak_line_force_N =
      std::max({r.line_loads.power_N, r.line_loads.left_N, r.line_loads.right_N});
  r.line = line_requirements(r.peak_line_force_N, in.line);
  r.line_required_diameter_m =
      in.line.diameter_m * std::sqrt(r.line.required_mbl_N / in.line.min_breaking_load_N);
  r.line_total_mass_kg = 3.0 * in.line.length_m * r.line.mass_per_meter_kg;
  if (!r.line.pass) {
    r.flags.push_back({"line_mbl", Severity::Fail,
                       "line minimum breaking load below the required value"});
  }

  r.battery_current_A = in.supply.idle_battery_current_A +
                        translate_drive_current(in.supply.drive_current_A, in.supply.ac_dc_factor);
  r.battery_runtime_h = battery_runtime(in.supply, r.battery_current_A);
  if (in.supply.required_hours > 0.0 && r.battery_runtime_h &&
      *r.battery_runtime_h < in.supply.required_hours) {
    r.flags.push_back({"battery_runtime", Severity::Fail,
                       "battery bank does not reach the required hours"});
  }

  r.logger_memory_B = logger_memory(in.logger);
  r.max_wind_m_s = max_wind_for_wing(in.wing, in.env.air_density_kg_m3);
  if (in.env.wind_speed_m_s > r.max_wind_m_s) {
    r.flags.push_back({"wing_loading", Severity::Warning,
                       "wind speed exceeds the 250 N/m^2 wing loading limit"});
  }
  return r;
}

}  // namespace awe
