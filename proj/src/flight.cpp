#include "awe/flight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace awe {

namespace {

int ratio_of(double period, double dt) { return static_cast<int>(std::lround(period / dt)); }

// Linear interpolation of the time where y crosses `level` between samples.
double crossing_time(const TelemetrySample& a, const TelemetrySample& b, double ya, double yb,
                     double level) {
  const double f = (level - ya) / (yb - ya);
  return a.t + f * (b.t - a.t);
}

}  // namespace

Flight::Flight(const AppConfig& cfg)
    : cfg_(cfg),
      gusts_(cfg.design.env, cfg.sim.core.seed),
      wing_loading_wind_(max_wind_for_wing(cfg.design.wing, cfg.design.env.air_density_kg_m3)),
      control_every_(ratio_of(cfg.sim.control_period_s, cfg.sim.core.dt_s)),
      telemetry_every_(ratio_of(cfg.sim.telemetry_period_s, cfg.sim.core.dt_s)),
      arbiter_(cfg.sim.core.actuators, cfg.sim.control_period_s) {
  cfg_.validate();
  reset();
}

void Flight::reset() {
  state_ = cfg_.sim.initial;
  state_.time_s = 0.0;
  act_ = ActuatorState{};
  status_ = FlightStatus::Flying;
  ap_ = AutopilotState{};
  manual_ = ManualInput{};
  arbiter_ = ModeArbiter(cfg_.sim.core.actuators, cfg_.sim.control_period_s);
  arbiter_.set_mode(cfg_.sim.initial_mode, 0.0);
  step_index_ = 0;
  control_steps_ = 0;
  refresh_forces();
}

void Flight::set_mode(ControlMode mode) {
  if (mode == ControlMode::Auto && arbiter_.mode() != ControlMode::Auto) ap_ = AutopilotState{};
  arbiter_.set_mode(mode, act_.steer_carriage_m);
}

void Flight::set_wind_speed(double wind_m_s) {
  if (!(std::isfinite(wind_m_s) && wind_m_s >= 0.0))
    throw std::invalid_argument("wind speed must be finite and >= 0");
  wind_override_ = wind_m_s;
  refresh_forces();
}

double Flight::wind_m_s() const {
  if (wind_override_) {
    Environment env = cfg_.design.env;
    env.wind_speed_m_s = *wind_override_;
    return GustProcess(env, cfg_.sim.core.seed).sample(state_.time_s);
  }
  return gusts_.sample(state_.time_s);
}

void Flight::refresh_forces() {
  const auto& c = cfg_.sim.core;
  forces_ = instantaneous_forces(state_, wind_m_s(), cfg_.design.env, cfg_.design.wing,
                                 act_.delta_m(c.actuators), act_.depower_m(), cfg_.design.policy,
                                 c.depower_min_multiplier, c.actuators.power_min_m);
}

void Flight::control() {
  double auto_cmd = 0.0;
  if (arbiter_.mode() == ControlMode::Auto) {
    const AutopilotOutput out = autopilot_update(state_, cfg_.autopilot, ap_);
    ap_ = out.state;
    auto_cmd = out.steer_cmd_m;
  }
  const ActuatorCommands cmds = arbiter_.apply(manual_, auto_cmd);
  act_.steer_cmd_m = cmds.steer_m;
  act_.power_cmd_m = cmds.power_m;
  ++control_steps_;
}

void Flight::step() {
  if (terminated()) return;
  const auto& c = cfg_.sim.core;
  if (control_due()) control();
  act_ = actuator_step(act_, c.dt_s, c.actuators);
  const StepResult r = step_state();
  state_ = r.state;
  ++step_index_;
  state_.time_s = static_cast<double>(step_index_) * c.dt_s;
  refresh_forces();
  const double speed = apparent_speed(state_, wind_m_s(), cfg_.design.wing, act_.depower_m(),
                                      c.depower_min_multiplier, c.actuators.power_min_m);
  status_ = classify(state_, speed, c);
}

StepResult Flight::step_state() const {
  return awe::step(state_, act_, wind_m_s(), cfg_.design.env, cfg_.design.wing,
                   cfg_.design.policy, cfg_.sim.core);
}

TelemetrySample Flight::sample() const {
  const auto& limits = cfg_.sim.core.actuators;
  TelemetrySample s;
  s.t = state_.time_s;
  s.theta = state_.elevation_rad;
  s.phi = state_.azimuth_rad;
  s.gamma = state_.heading_rad;
  const double wind = wind_m_s();
  s.v = std::max(0.0, apparent_speed(state_, wind, cfg_.design.wing, act_.depower_m(),
                                     cfg_.sim.core.depower_min_multiplier, limits.power_min_m));
  s.F_total = forces_.total_N;
  s.F_power = forces_.power_N;
  s.F_left = forces_.left_N;
  s.F_right = forces_.right_N;
  s.delta = act_.delta_m(limits);
  s.z = act_.depower_m();
  s.steer_cmd = act_.steer_cmd_m;
  s.power_cmd = act_.power_cmd_m;
  s.mode = static_cast<int>(arbiter_.mode());
  s.status = static_cast<int>(status_);
  s.wind = wind;
  if (act_.overrange) s.flags |= telemetry_flags::kOverrange;
  if (forces_.clamped) s.flags |= telemetry_flags::kForceClamped;
  if (wind > wing_loading_wind_) s.flags |= telemetry_flags::kWindAlert;
  return s;
}

FlightSummary summarize(const std::vector<TelemetrySample>& samples, const WingParams& wing,
                        const Environment& env, double analysis_start_s) {
  FlightSummary out;
  out.samples = samples.size();
  if (samples.empty()) return out;
  out.duration_s = samples.back().t - samples.front().t;
  out.final_status = static_cast<FlightStatus>(samples.back().status);

  int crossings = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i - 1].phi < 0.0 && samples[i].phi >= 0.0) ++crossings;
  }
  out.eights = std::max(0, crossings - 1);

  std::size_t first = 0;
  while (first < samples.size() && samples[first].t < analysis_start_s) ++first;
  if (samples.size() - first < 2) {
    first = 0;
  } else {
    out.analysis_start_s = analysis_start_s;
  }
  const std::size_t n = samples.size() - first;

  double peak_all = 0.0;
  for (const auto& s : samples) peak_all = std::max(peak_all, s.F_total);
  out.peak_force_N = peak_all;
  const double envelope = peak_traction_force(wing, env);
  out.peak_force_fraction = envelope > 0 ? peak_all / envelope : 0.0;

  double sum = 0.0;
  double lo = samples[first].F_total;
  double hi = lo;
  for (std::size_t i = first; i < samples.size(); ++i) {
    const auto& s = samples[i];
    sum += s.F_total;
    lo = std::min(lo, s.F_total);
    hi = std::max(hi, s.F_total);
    out.max_abs_azimuth_rad = std::max(out.max_abs_azimuth_rad, std::abs(s.phi));
  }
  out.mean_force_N = sum / static_cast<double>(n);
  out.min_force_N = lo;
  out.force_ratio = lo > 0 ? hi / lo : 0.0;

  std::vector<double> force_up;
  std::vector<double> phi_up;
  std::vector<std::size_t> phi_up_index;
  for (std::size_t i = first + 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    if (a.F_total < out.mean_force_N && b.F_total >= out.mean_force_N)
      force_up.push_back(crossing_time(a, b, a.F_total, b.F_total, out.mean_force_N));
    if (a.phi < 0.0 && b.phi >= 0.0) {
      phi_up.push_back(crossing_time(a, b, a.phi, b.phi, 0.0));
      phi_up_index.push_back(i);
    }
  }
  if (force_up.size() >= 2) {
    out.measured_period_s =
        (force_up.back() - force_up.front()) / static_cast<double>(force_up.size() - 1);
  }
  if (phi_up.size() >= 2) {
    // Path length between the first and last crossing, trapezoid on the
    // samples plus the partial intervals at both ends.
    const std::size_t i0 = phi_up_index.front();
    const std::size_t i1 = phi_up_index.back();
    double length = (samples[i0].t - phi_up.front()) * samples[i0].v;
    for (std::size_t i = i0 + 1; i < i1; ++i) {
      length += 0.5 * (samples[i - 1].v + samples[i].v) * (samples[i].t - samples[i - 1].t);
    }
    length -= (samples[i1 - 1].t - phi_up.back()) * samples[i1 - 1].v;
    out.path_length_per_eight_m = length / static_cast<double>(phi_up.size() - 1);
    if (env.wind_speed_m_s > 0) {
      out.predicted_period_s =
          0.5 * *out.path_length_per_eight_m / (wing.efficiency * env.wind_speed_m_s);
    }
  }
  return out;
}

SimulationResult run_simulation(const AppConfig& cfg, double duration_s) {
  if (!(std::isfinite(duration_s) && duration_s >= 0.0))
    throw std::invalid_argument("duration must be finite and >= 0");
  const double dt = cfg.sim.core.dt_s;
  const double budget =
      cfg.sim.telemetry_budget_B > 0
          ? cfg.sim.telemetry_budget_B
          : logger_memory(telemetry_logger_plan(duration_s, cfg.sim.telemetry_period_s));
  TelemetryLog log(budget);

  Flight flight(cfg);
  const auto total_steps = static_cast<std::uint64_t>(std::ceil(duration_s / dt - 1e-9));
  while (flight.step_index() < total_steps) {
    if (flight.telemetry_due() || flight.terminated()) log.record(flight.sample());
    if (flight.terminated()) break;
    flight.step();
  }

  SimulationResult out;
  out.samples = log.samples();
  out.summary = summarize(out.samples, cfg.design.wing, cfg.design.env, cfg.sim.analysis_start_s);
  out.summary.log_budget_exhausted = log.budget_exhausted();
  out.summary.rejected_samples = log.fault_count();
  if (!out.samples.empty()) out.summary.final_status = flight.status();
  return out;
}

nlohmann::ordered_json summary_to_json(const FlightSummary& s) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["duration_s"] = s.duration_s;
  j["samples"] = s.samples;
  j["eights"] = s.eights;
  j["peak_force_N"] = s.peak_force_N;
  j["peak_force_fraction"] = s.peak_force_fraction;
  j["mean_force_N"] = s.mean_force_N;
  j["min_force_N"] = s.min_force_N;
  j["force_ratio"] = s.force_ratio;
  j["measured_period_s"] = opt(s.measured_period_s);
  j["path_length_per_eight_m"] = opt(s.path_length_per_eight_m);
  j["predicted_period_s"] = opt(s.predicted_period_s);
  j["analysis_start_s"] = s.analysis_start_s;
  j["max_abs_azimuth_rad"] = s.max_abs_azimuth_rad;
  j["final_status"] = to_string(s.final_status);
  j["log_budget_exhausted"] = s.log_budget_exhausted;
  j["rejected_samples"] = s.rejected_samples;
  return j;
}

std::string format_summary_text(const FlightSummary& s) {
  auto opt = [](const std::optional<double>& v, const char* fmt) {
    if (!v) return std::string("n/a");
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, *v);
    return std::string(buf);
  };
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "duration          %.2f s\n"
                "samples           %zu\n"
                "figure-eights     %d\n"
                "peak force        %.1f N (%.3f of envelope)\n"
                "mean force        %.1f N\n"
                "min force         %.1f N\n"
                "max/min ratio     %.3f\n"
                "force period      %s s\n"
                "path per eight    %s m\n"
                "predicted period  %s s\n"
                "max |azimuth|     %.3f rad\n"
                "final status      %s\n",
                s.duration_s, s.samples, s.eights, s.peak_force_N, s.peak_force_fraction,
                s.mean_force_N, s.min_force_N, s.force_ratio,
                opt(s.measured_period_s, "%.3f").c_str(),
                opt(s.path_length_per_eight_m, "%.2f").c_str(),
                opt(s.predicted_period_s, "%.3f").c_str(), s.max_abs_azimuth_rad,
                to_string(s.final_status));
  std::string out = buf;
  if (s.log_budget_exhausted) out += "telemetry log budget exhausted\n";
  return out;
}

}  // namespace awe
