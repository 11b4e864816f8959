#include "awe/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace awe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGravity = 9.81;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

double unit_uniform(std::mt19937_64& rng) {
  // Portable across standard libraries, unlike uniform_real_distribution.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

KiteState advance(const KiteState& s, const StateRates& r, double h) {
  KiteState out = s;
  out.elevation_rad += h * r.elevation;
  out.azimuth_rad += h * r.azimuth;
  out.heading_rad += h * r.heading;
  return out;
}

}  // namespace

const char* to_string(FlightStatus s) {
  switch (s) {
    case FlightStatus::Flying: return "flying";
    case FlightStatus::Landed: return "landed";
    case FlightStatus::OutOfWindow: return "out_of_window";
    case FlightStatus::Stalled: return "stalled";
  }
  return "unknown";
}

void ActuatorLimits::validate() const {
  require(steer_limit_m > 0 && std::isfinite(steer_limit_m), "actuators.steer_limit_m must be > 0");
  require(steer_rate_m_s > 0 && std::isfinite(steer_rate_m_s),
          "actuators.steer_rate_m_s must be > 0");
  require(carriage_multiplier > 0 && std::isfinite(carriage_multiplier),
          "actuators.carriage_multiplier must be > 0");
  require(power_min_m < 0 && std::isfinite(power_min_m), "actuators.power_min_m must be < 0");
  require(power_rate_m_s > 0 && std::isfinite(power_rate_m_s),
          "actuators.power_rate_m_s must be > 0");
}

void SimConfig::validate() const {
  require(dt_s > 0 && dt_s <= 0.05, "sim.dt_s must be in (0, 0.05]");
  require(depower_min_multiplier > 0 && depower_min_multiplier <= 1,
          "sim.depower_min_multiplier must be in (0, 1]");
  require(std::isfinite(gravity_drift_coeff) && gravity_drift_coeff >= 0,
          "sim.gravity_drift_coeff must be >= 0");
  require(gravity_speed_floor_m_s > 0, "sim.gravity_speed_floor_m_s must be > 0");
  require(stall_speed_m_s >= 0, "sim.stall_speed_m_s must be >= 0");
  require(landing_elevation_rad >= 0 && landing_elevation_rad < kPi / 2,
          "sim.landing_elevation_rad must be in [0, pi/2)");
  actuators.validate();
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

double depower_multiplier(double depower_m, double mu_min, double power_min_m) {
  return 1.0 + (depower_m / -power_min_m) * (1.0 - mu_min);
}

double apparent_speed(const KiteState& state, double wind_m_s, const WingParams& wing,
                      double depower_m, double mu_min, double power_min_m) {
  return wing.efficiency * wind_m_s * std::cos(state.elevation_rad) *
         std::cos(state.azimuth_rad) * depower_multiplier(depower_m, mu_min, power_min_m);
}

double turn_rate(const WingParams& wing, double delta_m, double speed_m_s) {
  // 1 / (r_min * delta_max) = 1 / (2.5 w_s * 0.15 w_s)
  return speed_m_s * delta_m / (0.375 * wing.wingspan_m * wing.wingspan_m);
}

double gravity_drift_rate(const KiteState& state, double speed_m_s, const SimConfig& cfg) {
  if (!cfg.gravity_drift_enabled) return 0.0;
  const double v = std::max(speed_m_s, cfg.gravity_speed_floor_m_s);
  return cfg.gravity_drift_coeff * (kGravity / v) * std::cos(state.elevation_rad) *
         std::sin(state.heading_rad);
}

StateRates state_rates(const KiteState& state, const ControlInputs& in, const WingParams& wing,
                       const SimConfig& cfg) {
  const double mu = depower_multiplier(in.depower_m, cfg.depower_min_multiplier,
                                       cfg.actuators.power_min_m);
  const double speed_over_cos_el =
      wing.efficiency * in.wind_m_s * std::cos(state.azimuth_rad) * mu;
  const double speed = speed_over_cos_el * std::cos(state.elevation_rad);
  const double r = state.tether_length_m;

  StateRates out;
  out.elevation = speed / r * std::cos(state.heading_rad);
  // v / cos(theta) in closed form: regular at the zenith.
  out.azimuth = speed_over_cos_el / r * std::sin(state.heading_rad);
  // Heading is measured against the local meridian, which rotates by
  // phi_dot * sin(theta) along the path (parallel transport on the sphere).
  out.heading = turn_rate(wing, in.delta_m, speed) + out.azimuth * std::sin(state.elevation_rad) +
                gravity_drift_rate(state, speed, cfg);
  return out;
}

FlightStatus classify(const KiteState& state, double speed_m_s, const SimConfig& cfg) {
  if (state.elevation_rad > kPi / 2 || std::abs(state.azimuth_rad) > kPi / 2)
    return FlightStatus::OutOfWindow;
  if (state.elevation_rad < cfg.landing_elevation_rad) return FlightStatus::Landed;
  if (speed_m_s < cfg.stall_speed_m_s) return FlightStatus::Stalled;
  return FlightStatus::Flying;
}

StepResult step(const KiteState& state, const ActuatorState& act, double wind_m_s,
                const Environment& env, const WingParams& wing, const PartitionPolicy& policy,
                const SimConfig& cfg) {
  const ControlInputs in{act.delta_m(cfg.actuators), act.depower_m(), wind_m_s};
  const double h = cfg.dt_s;

  KiteState next;
  if (cfg.integrator == Integrator::Euler) {
    next = advance(state, state_rates(state, in, wing, cfg), h);
  } else {
    const StateRates k1 = state_rates(state, in, wing, cfg);
    const StateRates k2 = state_rates(advance(state, k1, h / 2), in, wing, cfg);
    const StateRates k3 = state_rates(advance(state, k2, h / 2), in, wing, cfg);
    const StateRates k4 = state_rates(advance(state, k3, h), in, wing, cfg);
    next = state;
    next.elevation_rad += h / 6 * (k1.elevation + 2 * k2.elevation + 2 * k3.elevation + k4.elevation);
    next.azimuth_rad += h / 6 * (k1.azimuth + 2 * k2.azimuth + 2 * k3.azimuth + k4.azimuth);
    next.heading_rad += h / 6 * (k1.heading + 2 * k2.heading + 2 * k3.heading + k4.heading);
  }
  next.time_s = state.time_s + h;

  if (!std::isfinite(next.elevation_rad) || !std::isfinite(next.azimuth_rad) ||
      !std::isfinite(next.heading_rad)) {
    std::ostringstream msg;
    msg << "non-finite kite state at t=" << state.time_s << " (theta=" << state.elevation_rad
        << ", phi=" << state.azimuth_rad << ", gamma=" << state.heading_rad
        << ", delta=" << in.delta_m << ", wind=" << in.wind_m_s << ")";
    throw SimulationFault(msg.str(), state);
  }
  next.heading_rad = wrap_angle(next.heading_rad);

  StepResult out;
  out.state = next;
  out.forces = instantaneous_forces(next, wind_m_s, env, wing, in.delta_m, in.depower_m, policy,
                                    cfg.depower_min_multiplier, cfg.actuators.power_min_m);
  const double speed = apparent_speed(next, wind_m_s, wing, in.depower_m,
                                      cfg.depower_min_multiplier, cfg.actuators.power_min_m);
  out.status = classify(next, speed, cfg);
  return out;
}

LineForces instantaneous_forces(const KiteState& state, double wind_m_s, const Environment& env,
                                const WingParams& wing, double delta_m, double depower_m,
                                const PartitionPolicy& policy, double mu_min,
                                double power_min_m) {
  Environment effective = env;
  effective.gust.reset();
  effective.wind_speed_m_s = wind_m_s * std::cos(state.elevation_rad) *
                             std::cos(state.azimuth_rad) *
                             depower_multiplier(depower_m, mu_min, power_min_m);
  // Past the window edge the attenuation factor changes sign; the force does not.
  effective.wind_speed_m_s = std::max(effective.wind_speed_m_s, 0.0);

  LineForces f;
  f.total_N = peak_traction_force(wing, effective);
  f.delta_N = steering_force_difference(wing, effective, delta_m);
  const LineLoads loads = partition_line_loads(f.total_N, f.delta_N, policy);
  f.power_N = loads.power_N;
  f.left_N = loads.left_N;
  f.right_N = loads.right_N;
  f.clamped = loads.clamped;
  return f;
}

ActuatorState actuator_step(const ActuatorState& act, double dt_s, const ActuatorLimits& limits) {
  ActuatorState out = act;
  const double steer_step = limits.steer_rate_m_s * dt_s;
  const double power_step = limits.power_rate_m_s * dt_s;
  out.steer_carriage_m +=
      std::clamp(act.steer_cmd_m - act.steer_carriage_m, -steer_step, steer_step);
  out.power_carriage_m +=
      std::clamp(act.power_cmd_m - act.power_carriage_m, -power_step, power_step);

  const double steer_clamped =
      std::clamp(out.steer_carriage_m, -limits.steer_limit_m, limits.steer_limit_m);
  const double power_clamped = std::clamp(out.power_carriage_m, limits.power_min_m, 0.0);
  out.overrange = std::abs(act.steer_cmd_m) > limits.steer_limit_m ||
                  act.power_cmd_m > 0.0 || act.power_cmd_m < limits.power_min_m;
  out.steer_carriage_m = steer_clamped;
  out.power_carriage_m = power_clamped;
  return out;
}

GustProcess::GustProcess(const Environment& env, std::uint64_t seed)
    : mean_(env.wind_speed_m_s) {
  if (!env.gust || env.gust->amplitude_fraction <= 0.0) return;
  amplitude_ = env.gust->amplitude_fraction;
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (int k = 0; k < kModes; ++k) {
    const double period = env.gust->period_s * (0.5 + 1.5 * unit_uniform(rng));
    omega_[k] = 2.0 * kPi / period;
    phase_[k] = 2.0 * kPi * unit_uniform(rng);
    weight_[k] = 0.5 + 0.5 * unit_uniform(rng);
    total += weight_[k];
  }
  for (double& w : weight_) w /= total;
}

double GustProcess::sample(double t_s) const {
  if (amplitude_ == 0.0) return mean_;
  double g = 0.0;
  for (int k = 0; k < kModes; ++k) g += weight_[k] * std::sin(omega_[k] * t_s + phase_[k]);
  return mean_ * (1.0 + amplitude_ * g);
}

double wind_sample(const GustProcess& gusts, double t_s) { return gusts.sample(t_s); }

}  // namespace awe
