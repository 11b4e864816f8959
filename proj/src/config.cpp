#include "awe/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <type_traits>

#include "json.hpp"

namespace awe {

namespace {

using nlohmann::json;

// Reads typed fields out of one JSON object, remembering which keys were
// used so that anything left over can be rejected.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "config root must be an object"
                                              : path_ + " must be an object");
  }

  bool has(const char* key) const { return obj_.contains(key); }

  void number(const char* key, double& out) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_number()) fail(where(key) + " must be a number");
    out = v->get<double>();
    if (!std::isfinite(out)) fail(where(key) + " must be finite");
  }

  void boolean(const char* key, bool& out) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_boolean()) fail(where(key) + " must be true or false");
    out = v->get<bool>();
  }

  void string(const char* key, std::string& out) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_string()) fail(where(key) + " must be a string");
    out = v->get<std::string>();
  }

  template <class Int>
  void integer(const char* key, Int& out) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_number_integer()) fail(where(key) + " must be an integer");
    if (v->is_number_unsigned()) {
      const auto u = v->get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max()))
        fail(where(key) + " is out of range");
      out = static_cast<Int>(u);
    } else {
      const auto s = v->get<std::int64_t>();
      if constexpr (std::is_unsigned_v<Int>) {
        if (s < 0) fail(where(key) + " must be >= 0");
      }
      out = static_cast<Int>(s);
    }
  }

  // Returns the nested object, or nullptr when the key is absent.
  const json* object(const char* key) { return take(key); }

  const json* array(const char* key) {
    const json* v = take(key);
    if (v && !v->is_array()) fail(where(key) + " must be an array");
    return v;
  }

  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) fail("unknown key '" + where(it.key().c_str()) + "'");
    }
  }

  [[noreturn]] static void fail(const std::string& msg) { throw ConfigError(msg); }

 private:
  const json* take(const char* key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

void read_wing(const json& j, WingParams& w) {
  Section s(j, "wing");
  s.number("area_m2", w.area_m2);
  s.number("lift_coeff", w.lift_coeff);
  s.number("efficiency", w.efficiency);
  s.number("wingspan_m", w.wingspan_m);
  s.number("height_m", w.height_m);
  s.finish();
}

void read_environment(const json& j, Environment& e) {
  Section s(j, "environment");
  s.number("air_density_kg_m3", e.air_density_kg_m3);
  s.number("wind_speed_m_s", e.wind_speed_m_s);
  s.number("wind_azimuth_rad", e.wind_azimuth_rad);
  if (const json* g = s.object("gust")) {
    if (g->is_null()) {
      e.gust.reset();
    } else {
      GustParams gp;
      Section gs(*g, "environment.gust");
      gs.number("amplitude_fraction", gp.amplitude_fraction);
      gs.number("period_s", gp.period_s);
      gs.finish();
      e.gust = gp;
    }
  }
  s.finish();
}

void read_geometry(const json& j, LoadGeometry& g) {
  Section s(j, "geometry");
  s.number("lateral_range_rad", g.lateral_range_rad);
  s.number("elevation_range_rad", g.elevation_range_rad);
  s.number("frame_safety_factor", g.frame_safety_factor);
  s.finish();
}

void read_partition(const json& j, PartitionPolicy& p) {
  Section s(j, "partition");
  s.number("power_line_fraction", p.power_line_fraction);
  s.finish();
}

void read_line(const json& j, LineSpec& l) {
  Section s(j, "line");
  s.number("diameter_m", l.diameter_m);
  s.number("min_breaking_load_N", l.min_breaking_load_N);
  s.number("density_kg_m3", l.density_kg_m3);
  s.number("length_m", l.length_m);
  s.number("safety_factor", l.safety_factor);
  s.finish();
}

void read_supply(const json& j, PowerSupplyParams& p) {
  Section s(j, "supply");
  s.integer("battery_count", p.battery_count);
  s.number("capacity_Ah_at_rated", p.capacity_Ah_at_rated);
  s.number("rated_current_A", p.rated_current_A);
  s.number("peukert_exponent", p.peukert_exponent);
  s.number("ac_dc_factor", p.ac_dc_factor);
  s.number("idle_battery_current_A", p.idle_battery_current_A);
  s.number("drive_current_A", p.drive_current_A);
  s.number("required_hours", p.required_hours);
  s.finish();
}

void read_logger(const json& j, LoggerPlan& plan) {
  Section s(j, "logger");
  s.number("duration_s", plan.duration_s);
  if (const json* groups = s.array("groups")) {
    plan.groups.clear();
    for (std::size_t i = 0; i < groups->size(); ++i) {
      LoggerGroup g;
      Section gs((*groups)[i], "logger.groups[" + std::to_string(i) + "]");
      gs.number("signal_count", g.signal_count);
      gs.number("bytes_per_signal", g.bytes_per_signal);
      gs.number("sample_period_s", g.sample_period_s);
      gs.finish();
      plan.groups.push_back(g);
    }
  }
  s.finish();
}

void read_actuators(const json& j, ActuatorLimits& a) {
  Section s(j, "sim.actuators");
  s.number("steer_limit_m", a.steer_limit_m);
  s.number("steer_rate_m_s", a.steer_rate_m_s);
  s.number("carriage_multiplier", a.carriage_multiplier);
  s.number("power_min_m", a.power_min_m);
  s.number("power_rate_m_s", a.power_rate_m_s);
  s.finish();
}

ControlMode parse_mode(const std::string& name, const std::string& where) {
  if (name == "auto") return ControlMode::Auto;
  if (name == "manual") return ControlMode::Manual;
  throw ConfigError(where + " must be \"auto\" or \"manual\"");
}

void read_sim(const json& j, SimSettings& sim) {
  Section s(j, "sim");
  SimConfig& c = sim.core;
  s.number("dt_s", c.dt_s);
  std::string integrator = c.integrator == Integrator::RK4 ? "rk4" : "euler";
  s.string("integrator", integrator);
  if (integrator == "rk4") {
    c.integrator = Integrator::RK4;
  } else if (integrator == "euler") {
    c.integrator = Integrator::Euler;
  } else {
    Section::fail("sim.integrator must be \"rk4\" or \"euler\"");
  }
  s.boolean("gravity_drift_enabled", c.gravity_drift_enabled);
  s.number("gravity_drift_coeff", c.gravity_drift_coeff);
  s.number("gravity_speed_floor_m_s", c.gravity_speed_floor_m_s);
  s.number("depower_min_multiplier", c.depower_min_multiplier);
  s.integer("seed", c.seed);
  s.number("stall_speed_m_s", c.stall_speed_m_s);
  s.number("landing_elevation_rad", c.landing_elevation_rad);
  s.number("tether_length_m", sim.initial.tether_length_m);
  s.number("control_period_s", sim.control_period_s);
  s.number("telemetry_period_s", sim.telemetry_period_s);
  s.number("analysis_start_s", sim.analysis_start_s);
  s.number("telemetry_budget_B", sim.telemetry_budget_B);
  std::string mode = to_string(sim.initial_mode);
  s.string("initial_mode", mode);
  sim.initial_mode = parse_mode(mode, "sim.initial_mode");
  if (const json* init = s.object("initial")) {
    Section is(*init, "sim.initial");
    is.number("elevation_rad", sim.initial.elevation_rad);
    is.number("azimuth_rad", sim.initial.azimuth_rad);
    is.number("heading_rad", sim.initial.heading_rad);
    is.finish();
  }
  if (const json* act = s.object("actuators")) read_actuators(*act, c.actuators);
  s.finish();
}

void read_autopilot(const json& j, AutopilotConfig& a) {
  Section s(j, "autopilot");
  s.number("target_azimuth_rad", a.target_azimuth_rad);
  s.number("target_elevation_rad", a.target_elevation_rad);
  s.number("switch_radius_rad", a.switch_radius_rad);
  s.number("switch_holdoff_s", a.switch_holdoff_s);
  s.number("steering_gain_m_per_rad", a.steering_gain_m_per_rad);
  s.number("command_limit_m", a.command_limit_m);
  s.finish();
}

void read_serve(const json& j, ServeConfig& c) {
  Section s(j, "serve");
  s.string("bind", c.bind);
  s.number("stream_rate_hz", c.stream_rate_hz);
  s.number("time_scale", c.time_scale);
  s.integer("queue_capacity", c.queue_capacity);
  s.finish();
}

bool whole_multiple(double period, double dt) {
  const double n = period / dt;
  return n >= 1.0 - 1e-9 && std::abs(n - std::round(n)) < 1e-6;
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// Byte offset (as reported by the parser) to a 1-based line and column.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  std::size_t line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  return {line, end - line_start + 1};
}

}  // namespace

void ServeConfig::validate(double dt_s) const {
  require(std::isfinite(stream_rate_hz) && stream_rate_hz > 0, "serve.stream_rate_hz must be > 0");
  require(whole_multiple(1.0 / stream_rate_hz, dt_s),
          "serve.stream_rate_hz must divide the physics rate");
  require(std::isfinite(time_scale) && time_scale > 0, "serve.time_scale must be > 0");
  require(queue_capacity >= 1, "serve.queue_capacity must be >= 1");
  const auto colon = bind.rfind(':');
  require(colon != std::string::npos && colon > 0 && colon + 1 < bind.size() &&
              bind.size() - colon <= 6 &&
              bind.find_first_not_of("0123456789", colon + 1) == std::string::npos,
          "serve.bind must be host:port");
  require(std::stoul(bind.substr(colon + 1)) <= 65535, "serve.bind port must be <= 65535");
}

void AppConfig::validate() const {
  design.wing.validate();
  design.env.validate();
  design.geometry.validate();
  design.policy.validate();
  design.line.validate();
  design.supply.validate();
  design.logger.validate();
  sim.core.validate();
  autopilot.validate();
  serve.validate(sim.core.dt_s);

  const double dt = sim.core.dt_s;
  require(whole_multiple(sim.control_period_s, dt),
          "sim.control_period_s must be a whole multiple of sim.dt_s");
  require(whole_multiple(sim.telemetry_period_s, dt),
          "sim.telemetry_period_s must be a whole multiple of sim.dt_s");
  require(sim.initial.tether_length_m > 0 && std::isfinite(sim.initial.tether_length_m),
          "sim.tether_length_m must be > 0");
  require(sim.analysis_start_s >= 0, "sim.analysis_start_s must be >= 0");
  require(sim.telemetry_budget_B >= 0, "sim.telemetry_budget_B must be >= 0");
  require(autopilot.command_limit_m <= sim.core.actuators.steer_limit_m + 1e-12,
          "autopilot.command_limit_m must not exceed sim.actuators.steer_limit_m");
  require(std::isfinite(sim.initial.heading_rad), "sim.initial.heading_rad must be finite");
  require(sim.initial.elevation_rad > sim.core.landing_elevation_rad &&
              sim.initial.elevation_rad < 1.5707963267948966,
          "sim.initial.elevation_rad must lie between the landing threshold and the zenith");
  require(std::abs(sim.initial.azimuth_rad) < 1.5707963267948966,
          "sim.initial.azimuth_rad must be inside the wind window");
}

AppConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte);
    std::string detail = e.what();
    if (const auto pos = detail.find("error: "); pos != std::string::npos) {
      detail = detail.substr(pos + 7);
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + detail,
                      line, column);
  }

  AppConfig cfg;
  // The sizing example uses an hour-long log of the control and path loops.
  cfg.design.logger = {3600.0, {{50, 8, 0.01}, {10, 8, 0.02}}};

  Section s(root, "");
  if (const json* v = s.object("wing")) read_wing(*v, cfg.design.wing);
  if (const json* v = s.object("environment")) read_environment(*v, cfg.design.env);
  if (const json* v = s.object("geometry")) read_geometry(*v, cfg.design.geometry);
  if (const json* v = s.object("partition")) read_partition(*v, cfg.design.policy);
  if (const json* v = s.object("line")) read_line(*v, cfg.design.line);
  if (const json* v = s.object("supply")) read_supply(*v, cfg.design.supply);
  if (const json* v = s.object("logger")) read_logger(*v, cfg.design.logger);
  if (const json* v = s.object("sim")) read_sim(*v, cfg.sim);
  if (const json* v = s.object("autopilot")) read_autopilot(*v, cfg.autopilot);
  if (const json* v = s.object("serve")) read_serve(*v, cfg.serve);
  s.finish();

  cfg.design.lms = {cfg.sim.core.actuators.carriage_multiplier,
                    cfg.sim.core.actuators.steer_limit_m};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const AppConfig& cfg, int indent) {
  nlohmann::ordered_json j;
  const auto& d = cfg.design;
  j["wing"] = {{"area_m2", d.wing.area_m2},
               {"lift_coeff", d.wing.lift_coeff},
               {"efficiency", d.wing.efficiency},
               {"wingspan_m", d.wing.wingspan_m},
               {"height_m", d.wing.height_m}};
  j["environment"] = {{"air_density_kg_m3", d.env.air_density_kg_m3},
                      {"wind_speed_m_s", d.env.wind_speed_m_s},
                      {"wind_azimuth_rad", d.env.wind_azimuth_rad}};
  if (d.env.gust) {
    j["environment"]["gust"] = {{"amplitude_fraction", d.env.gust->amplitude_fraction},
                                {"period_s", d.env.gust->period_s}};
  }
  j["geometry"] = {{"lateral_range_rad", d.geometry.lateral_range_rad},
                   {"elevation_range_rad", d.geometry.elevation_range_rad},
                   {"frame_safety_factor", d.geometry.frame_safety_factor}};
  j["partition"] = {{"power_line_fraction", d.policy.power_line_fraction}};
  j["line"] = {{"diameter_m", d.line.diameter_m},
               {"min_breaking_load_N", d.line.min_breaking_load_N},
               {"density_kg_m3", d.line.density_kg_m3},
               {"length_m", d.line.length_m},
               {"safety_factor", d.line.safety_factor}};
  j["supply"] = {{"battery_count", d.supply.battery_count},
                 {"capacity_Ah_at_rated", d.supply.capacity_Ah_at_rated},
                 {"rated_current_A", d.supply.rated_current_A},
                 {"peukert_exponent", d.supply.peukert_exponent},
                 {"ac_dc_factor", d.supply.ac_dc_factor},
                 {"idle_battery_current_A", d.supply.idle_battery_current_A},
                 {"drive_current_A", d.supply.drive_current_A},
                 {"required_hours", d.supply.required_hours}};
  auto groups = nlohmann::ordered_json::array();
  for (const auto& g : d.logger.groups) {
    groups.push_back({{"signal_count", g.signal_count},
                      {"bytes_per_signal", g.bytes_per_signal},
                      {"sample_period_s", g.sample_period_s}});
  }
  j["logger"] = {{"duration_s", d.logger.duration_s}, {"groups", groups}};

  const auto& s = cfg.sim;
  const auto& a = s.core.actuators;
  j["sim"] = {{"dt_s", s.core.dt_s},
              {"integrator", s.core.integrator == Integrator::RK4 ? "rk4" : "euler"},
              {"gravity_drift_enabled", s.core.gravity_drift_enabled},
              {"gravity_drift_coeff", s.core.gravity_drift_coeff},
              {"gravity_speed_floor_m_s", s.core.gravity_speed_floor_m_s},
              {"depower_min_multiplier", s.core.depower_min_multiplier},
              {"seed", s.core.seed},
              {"stall_speed_m_s", s.core.stall_speed_m_s},
              {"landing_elevation_rad", s.core.landing_elevation_rad},
              {"tether_length_m", s.initial.tether_length_m},
              {"control_period_s", s.control_period_s},
              {"telemetry_period_s", s.telemetry_period_s},
              {"analysis_start_s", s.analysis_start_s},
              {"telemetry_budget_B", s.telemetry_budget_B},
              {"initial_mode", to_string(s.initial_mode)},
              {"initial",
               {{"elevation_rad", s.initial.elevation_rad},
                {"azimuth_rad", s.initial.azimuth_rad},
                {"heading_rad", s.initial.heading_rad}}},
              {"actuators",
               {{"steer_limit_m", a.steer_limit_m},
                {"steer_rate_m_s", a.steer_rate_m_s},
                {"carriage_multiplier", a.carriage_multiplier},
                {"power_min_m", a.power_min_m},
                {"power_rate_m_s", a.power_rate_m_s}}}};
  const auto& ap = cfg.autopilot;
  j["autopilot"] = {{"target_azimuth_rad", ap.target_azimuth_rad},
                    {"target_elevation_rad", ap.target_elevation_rad},
                    {"switch_radius_rad", ap.switch_radius_rad},
                    {"switch_holdoff_s", ap.switch_holdoff_s},
                    {"steering_gain_m_per_rad", ap.steering_gain_m_per_rad},
                    {"command_limit_m", ap.command_limit_m}};
  j["serve"] = {{"bind", cfg.serve.bind},
                {"stream_rate_hz", cfg.serve.stream_rate_hz},
                {"time_scale", cfg.serve.time_scale},
                {"queue_capacity", cfg.serve.queue_capacity}};
  return j.dump(indent);
}

}  // namespace awe
